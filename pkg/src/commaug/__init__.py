"""Multi-resolution community features for propagation-free node classification.

The pipeline: seeded Louvain at an adaptively chosen set of resolutions,
one-hot community assignments projected through trainable matrices,
concatenated with node features, and classified by a small MLP. Includes
information-theoretic diagnostics for the community/label alignment and a
planted-partition generator for controlled experiments.
"""

__version__ = "0.1.0"
