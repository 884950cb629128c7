"""Webgraph link-scheme interventions: PageRank-family kernels, link-scheme
identification, backlink reweighting and retention / RIS evaluation."""

__version__ = "0.1.0"
