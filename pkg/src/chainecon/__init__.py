"""chainecon: batch analytics over a Bitcoin-style transaction stream.

Pipeline stages: common-input address clustering, genuine-payment
filtering (change / dust / macro removal), monthly actor categories
(frequent receivers, their first neighbors, others), inter-category
flow aggregation, and time-zone inference by circular alignment of
weekly activity patterns. A seeded synthetic-chain generator with
planted ground truth supports end-to-end verification.
"""

__version__ = "0.1.0"
