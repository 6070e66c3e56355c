"""Bioassay semantification: cluster-copy and per-statement labeling engines.

Submodules:
  corpus              corpora, statements, pruning, folds
  vectorizer          TF-IDF embedding
  kmeans              seeded K-means and elbow selection
  cluster_semantifier nearest-cluster statement copying
  label_semantifier   per-(assay, statement) linear classifier
  evaluation          P/R/F1 scoring, cross-validation, timing
  artifact            JSON model save/load
  synthetic           seeded benchmark data generators
  service             REST curation service
  cli                 command-line front end
"""

from .corpus import Bioassay, Corpus, Statement, load_corpus
from .vectorizer import TfidfVectorizer, tokenize

__version__ = "0.1.0"

__all__ = [
    "Bioassay",
    "Corpus",
    "Statement",
    "TfidfVectorizer",
    "load_corpus",
    "tokenize",
    "__version__",
]
