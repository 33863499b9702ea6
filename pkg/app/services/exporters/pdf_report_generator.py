"""Export run ledgers and stability sweeps to PDF with charts"""

import io
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional, Sequence

try:
    from reportlab.lib import colors
    from reportlab.lib.enums import TA_CENTER
    from reportlab.lib.pagesizes import letter
    from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
    from reportlab.lib.units import inch
    from reportlab.platypus import Image, PageBreak, Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle
    REPORTLAB_AVAILABLE = True
except ImportError:
    REPORTLAB_AVAILABLE = False

try:
    import matplotlib
    matplotlib.use('Agg')  # Non-GUI backend
    import matplotlib.pyplot as plt
    MATPLOTLIB_AVAILABLE = True
except ImportError:
    MATPLOTLIB_AVAILABLE = False

logger = logging.getLogger(__name__)

LEDGER_PLOTS = (
    ('Instant norms', ('norm_full_0', 'norm_full_1', 'norm_tan_1')),
    ('Boundary residuals', ('front_residual', 'bc_residual')),
    ('Involution drift', ('inv_rho', 'inv1', 'inv2')),
)


class PDFReportGenerator:
    """Generate PDF reports of simulation ledgers and stability sweeps"""

    def __init__(self, timestamp: Optional[str] = None):
        if not REPORTLAB_AVAILABLE:
            raise ImportError("reportlab is required for PDF generation. Install with: pip install reportlab")

        self.timestamp = timestamp
        self.styles = getSampleStyleSheet()
        self._create_custom_styles()

    def _create_custom_styles(self):
        self.styles.add(ParagraphStyle(
            name='CustomTitle',
            parent=self.styles['Heading1'],
            fontSize=22,
            textColor=colors.HexColor('#1f497d'),
            spaceAfter=24,
            alignment=TA_CENTER
        ))
        self.styles.add(ParagraphStyle(
            name='SectionHeader',
            parent=self.styles['Heading2'],
            fontSize=15,
            textColor=colors.HexColor('#1f497d'),
            spaceAfter=10,
            spaceBefore=10
        ))

    def _document(self, output_path) -> SimpleDocTemplate:
        pdf_path = Path(output_path)
        pdf_path.parent.mkdir(parents=True, exist_ok=True)
        return SimpleDocTemplate(str(pdf_path), pagesize=letter,
                                 rightMargin=72, leftMargin=72, topMargin=72, bottomMargin=72)

    def _title(self, text: str):
        stamp = self.timestamp or datetime.now().strftime("%B %d, %Y at %H:%M")
        date_para = Paragraph(f"Generated on {stamp}", self.styles['Normal'])
        date_para.alignment = TA_CENTER
        return [Paragraph(text, self.styles['CustomTitle']), date_para, Spacer(1, 0.3 * inch)]

    def _table(self, data, col_widths):
        table = Table(data, colWidths=col_widths)
        table.setStyle(TableStyle([
            ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor('#4f81bd')),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
            ('ALIGN', (0, 0), (-1, -1), 'LEFT'),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
            ('FONTSIZE', (0, 0), (-1, -1), 9),
            ('BOTTOMPADDING', (0, 0), (-1, 0), 8),
            ('BACKGROUND', (0, 1), (-1, -1), colors.beige),
            ('GRID', (0, 0), (-1, -1), 0.5, colors.grey),
        ]))
        return table

    @staticmethod
    def _figure_image(fig):
        img_buffer = io.BytesIO()
        fig.savefig(img_buffer, format='png', dpi=150, bbox_inches='tight')
        img_buffer.seek(0)
        plt.close(fig)
        return Image(img_buffer, width=6 * inch, height=3 * inch)

    def generate_run_report(self, ledger, summary: Dict, output_path, include_charts: bool = True) -> Path:
        """Summary table plus ledger time series of a simulate run

        Args:
            ledger: EnergyLedger of the run
            summary: Flat dict of run facts (steps, dt, norms)
            output_path: Path to save the PDF file
            include_charts: Whether to add the time series plots
        """
        doc = self._document(output_path)
        story = self._title("Linearized Contact Discontinuity Run")
        story.append(Paragraph("Run Summary", self.styles['SectionHeader']))
        data = [['Metric', 'Value']] + [[str(k), _short(v)] for k, v in sorted(summary.items())]
        story.append(self._table(data, [3 * inch, 2.5 * inch]))

        if include_charts and MATPLOTLIB_AVAILABLE and ledger.rows:
            story.append(PageBreak())
            story.append(Paragraph("Ledger Time Series", self.styles['SectionHeader']))
            t = ledger.column('t')
            energies = [c for c in ledger.columns if c.startswith('E_tan_b')]
            for title, names in (('Tangential energies', tuple(energies)),) + LEDGER_PLOTS:
                present = [n for n in names if n in ledger.columns]
                if not present:
                    continue
                fig, ax = plt.subplots(figsize=(8, 4))
                for name in present:
                    ax.plot(t, ledger.column(name), label=name)
                ax.set_xlabel('t', fontsize=10, fontweight='bold')
                ax.set_title(title, fontsize=12, fontweight='bold')
                ax.grid(alpha=0.3, linestyle='--')
                ax.legend(fontsize=8)
                fig.tight_layout()
                story.append(self._figure_image(fig))
                story.append(Spacer(1, 0.2 * inch))

        doc.build(story)
        logger.info(f"Run report written to {output_path}")
        return Path(output_path)

    def generate_sweep_report(self, rows: Sequence, output_path, include_charts: bool = True) -> Path:
        """Classification counts and a satisfied/not-satisfied scatter plot of a sweep"""
        doc = self._document(output_path)
        story = self._title("Stability Condition Sweep")
        n_sat = sum(1 for r in rows if r.verdict.satisfied)
        n_edge = sum(1 for r in rows if r.verdict.on_boundary)
        data = [
            ['Metric', 'Value'],
            ['Points', str(len(rows))],
            ['Satisfied', str(n_sat)],
            ['Not satisfied', str(len(rows) - n_sat)],
            ['On boundary', str(n_edge)],
        ]
        story.append(Paragraph("Classification", self.styles['SectionHeader']))
        story.append(self._table(data, [3 * inch, 2 * inch]))

        if include_charts and MATPLOTLIB_AVAILABLE and rows:
            fig, ax = plt.subplots(figsize=(8, 4))
            sat = [r for r in rows if r.verdict.satisfied]
            unsat = [r for r in rows if not r.verdict.satisfied]
            ax.scatter([r.f22 for r in sat], [r.f11m for r in sat], s=8, color='#4CAF50', label='satisfied')
            ax.scatter([r.f22 for r in unsat], [r.f11m for r in unsat], s=8, color='#F44336',
                       label='not-satisfied')
            ax.set_xlabel('F22 / F11+', fontsize=10, fontweight='bold')
            ax.set_ylabel('F11- / F11+', fontsize=10, fontweight='bold')
            ax.set_title('Stability classification', fontsize=12, fontweight='bold')
            ax.grid(alpha=0.3, linestyle='--')
            ax.legend(fontsize=8)
            fig.tight_layout()
            story.append(Spacer(1, 0.2 * inch))
            story.append(self._figure_image(fig))

        doc.build(story)
        logger.info(f"Sweep report written to {output_path}")
        return Path(output_path)


def _short(value) -> str:
    if isinstance(value, float):
        return f'{value:.6g}'
    return str(value)
