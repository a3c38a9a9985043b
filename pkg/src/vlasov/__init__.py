"""
1D-1V Vlasov-Poisson on a Fourier x AW Hermite basis.

Usage:
    from src.vlasov.solver import VlasovPoissonSolver, vp_step, vlasov_rhs
    from src.vlasov.field import CoefficientField, poisson_solve
"""
