"""countbmc: two-dimensional bounded model checking for place/transition nets.

A property is checked by unrolling the net a bounded number of execution
steps under a per-place token cap, compiling the bounded semantics to
QF_LIA, and handing the script to an external SMT-LIB 2 solver.  An
explicit-state oracle implements the same bounded semantics directly.
"""

__version__ = "0.1.0"
