"""
Conserved quantities, per-step records and the diagnostics table.

Submodules are imported directly (src.diagnostics.moments, .records, .sink)
so the solvers can depend on the moment helpers without a package cycle.
"""
