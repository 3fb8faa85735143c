"""cxrkit: desk-scale chest X-ray vision-language pipeline.

Subpackages: corpus (dataset compilation), model (towers, projector, decoder),
training (staged optimization), metrics (scores and statistics), bench
(evaluation harness), study (reader-study service), cli (entry point).
"""

__version__ = "0.1.0"
