from .helpers import matrix_field, pairwise_sum

__all__ = ["matrix_field", "pairwise_sum"]
