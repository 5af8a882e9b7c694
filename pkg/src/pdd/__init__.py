"""Personal-data detection for tabular datasets.

Two detectors classify each column of a dataset as personal or
non-personal: a deterministic rule engine (``pdd.rules``) and an LLM
prompt pipeline (``pdd.llm``). ``pdd.evaluation`` scores either against
ground-truth labels.
"""

__version__ = "0.1.0"
