"""Coding finite binary prefixes into effectively closed classes with prescribed oracle use."""

from .core import Dyadic, LevelSchedule, geometric, log_schedule, measure_of, parse_schedule, validate_schedule
from .piclass import EnumeratedClass, generate_class, is_extendible
from .labelling import LabelledTree, StageEvent, init, run_until, step
from .invariants import check_all
from .codec import CodeResult, decode, encode, roundtrip

__version__ = "0.1.0"
