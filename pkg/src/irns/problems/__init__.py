from .hinge import (HingeDataset, HingeProblem, hinge_directional_sup_terms, hinge_value,
                    make_separable_hinge)
from .libsvm import ParseError, parse_sparse_dataset, parse_sparse_lines, write_sparse_dataset
from .slcp import (SlcpInstance, SlcpProblem, erm_directional_sup_terms, erm_value,
                   generate_slcp)

__all__ = [
    "HingeDataset", "HingeProblem", "hinge_value", "hinge_directional_sup_terms",
    "make_separable_hinge", "ParseError", "parse_sparse_dataset", "parse_sparse_lines",
    "write_sparse_dataset", "SlcpInstance", "SlcpProblem", "generate_slcp", "erm_value",
    "erm_directional_sup_terms",
]
