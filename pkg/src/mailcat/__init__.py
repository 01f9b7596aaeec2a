"""mailcat: classify emails into folders with a small neural network.

Pipeline: mbox/eml/CSV ingestion -> tokenization with stop-word exclusion
-> frequency-ranked vocabulary -> document-term matrix -> chi-square
feature selection -> single-hidden-layer network trained by mini-batch
gradient descent -> confusion-matrix evaluation and parameter sweeps.
"""

__version__ = "0.1.0"

from . import kernels

__all__ = ["kernels", "__version__"]
