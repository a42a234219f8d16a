"""
oracle-rank: realistic evaluation toolchain for neural test oracle generation
"""

__version__ = "1.0.0"
