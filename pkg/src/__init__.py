"""hetero-topo - sparse topology learning and decentralized SGD under data heterogeneity."""

__version__ = "0.1.0"
