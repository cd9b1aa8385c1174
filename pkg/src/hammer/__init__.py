"""Machine-learned proof advice for formal-mathematics corpora.

The package parses typed theorem corpora, learns premise selection from
proof dependencies, encodes conjectures to first-order logic, runs a
portfolio of provers under a wall-clock budget, minimizes the found proofs,
and answers with replayable tactic suggestions over TCP, HTTP, or the CLI.
"""

__version__ = "1.0.0"
