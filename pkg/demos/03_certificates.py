"""
Checking a ratio claim step by step
===================================

A greedy run is also a path of small jumps from the empty solution.  Writing
each jump down with its extra cost turns the run into a certificate that can
be checked without trusting the solver.
"""

from seipcover import IsolationFunction, exact_solve, greedy_solve, harmonic
from seipcover.analysis import certificate_from_trace, check_path_certificate
from seipcover.generators import RandomSpec, gen_random_k_cover
from seipcover.io import certificate_to_text

inst = gen_random_k_cover(RandomSpec(n=12, m=10, k=3, seed=7))
opt = exact_solve(inst).value
trace = greedy_solve(inst).trace

cert = certificate_from_trace(inst, trace, opt, gap=1)
report = check_path_certificate(inst, cert, IsolationFunction.for_instance(inst))
print("valid:", report.valid)
print("claimed bound", report.bound, "~", float(report.bound), "| H_3 =", harmonic(3))
print("achieved ratio", report.final_ratio)
print(certificate_to_text(cert)[:300], "...")
