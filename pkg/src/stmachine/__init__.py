"""Streaming machines with bounded reversals and bounded internal memory.

Subpackages: ``meter`` (the metered runtime), ``instances`` (hard-instance
generators and oracles), ``algorithms``, ``treelang`` (tag streams and tree
automata), ``xpath`` (Core XPath) and ``cli``.
"""

__version__ = "0.1.0"
