"""Experiment orchestration, verification suites and the command line."""

from .compare import compare_variance_aware
from .experiment import ExperimentConfig, parse_seeds, read_csv, run_experiment, write_csv
from .verify import (VerificationReport, coverage_tolerance, verify_coverage, verify_epcl,
                     verify_lemma1, verify_lemma1_nonstationary)
