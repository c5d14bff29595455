# Copyright (C) 2019, 2020, 2021, 2022, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.

from .schema import ConfigSchema
from .types import ConfigString


class BaseSchema(ConfigSchema, prefix=""):

    #: Input spikes closer than this (seconds) are merged into one input
    coincidence_window: float = 0.0

    #: Worker processes for per-neuron inference and benchmarks; 1 is serial and deterministic
    threads: int = 1

    seed: int = 0

    #: Name given to the run manifest written beside each output
    manifest_name: ConfigString = "{output}.manifest.json"

    #: Set by the runner to the output path of the current command
    output: str = "lifpath-output"


class ModelConfig(ConfigSchema, prefix="model"):

    #: Farad
    capacitance: float = 1.0
    #: Siemens; zero selects the perfect integrator
    conductance: float = 0.0
    #: Volt
    threshold: float = 1.0
    #: Ampere times square root of a second
    noise_std: float = 0.0
    #: Refractory period in seconds; inputs this soon after a spike are ignored
    tau_r: float = 0.0
    #: Propagation delay in seconds added to every presynaptic spike
    tau_d: float = 0.0


class SimulateConfig(ConfigSchema, prefix="simulate"):

    #: Integration step in seconds
    dt: float = 1e-5

    #: Spikes per neuron per second above which a run is declared saturated
    max_rate: float = 1e4

    #: ``exact`` for Ornstein-Uhlenbeck stepping or ``rk4`` for the explicit Runge-Kutta cross-check
    integrator: str = "exact"


class InferConfig(ConfigSchema, prefix="infer"):

    #: ``fixed`` or ``moving`` threshold
    mode: str = "fixed"

    #: Stop when an accepted Newton step improves L* by less than this
    epsilon: float = 1e-12

    max_iters: int = 200

    #: Stop when the gradient norm falls below this times the curvature scale
    gradient_tolerance: float = 1e-9

    #: Relative ridge added to the Newton system, never to the reported Hessian
    ridge: float = 1e-12

    #: Candidates closer than this (relative) are reported as near ties
    tie_tolerance: float = 1e-10

    #: Leak time override in seconds used for the I*tau coordinate
    tau: float

    #: Noise strength for moving threshold mode and error bars; defaults to model.noise_std
    sigma: float

    prior_jmin: float
    prior_jmax: float
    prior_weight: float

    #: Use the windowed rates for the effective current in moving threshold mode
    windowed_rates: bool = False

    #: Subtract (N_i-1) U(I^e_i) from the log-likelihood
    cost_energy: bool = False


class MovingThresholdConfig(ConfigSchema, prefix="mthreshold"):

    #: Survival level whose intersection with the tangent defines the moving threshold
    survival_level: float = 0.5

    bins: int = 16

    #: Smallest bin edge as a fraction of the leak time
    bin_min_fraction: float = 0.01

    #: Largest bin edge as a multiple of the longest ISI
    bin_max_factor: float = 10.0

    #: Slopes smaller than this in magnitude are treated as underflow
    slope_floor: float = 1e-300

    #: Lowest moving threshold, as a fraction of V_th, used when the slope underflows
    floor: float = 0.0


class SpecfunConfig(ConfigSchema, prefix="specfun"):

    #: Largest eigenvalue order searched
    n_max: float = 150.0

    #: Grid step used to bracket eigenvalue roots
    eigen_step: float = 0.25

    #: Bound on the dropped tail of the survival series
    truncation: float = 1e-8

    #: Largest argument for which Weber functions are considered valid
    z_max: float = 50.0


class AnalysisConfig(ConfigSchema, prefix="analysis"):

    #: Fraction of the correlogram window on each side used to normalize
    correlogram_tail: float = 0.2

    #: Couplings (units of C V_th) below this enter the latency fit
    latency_threshold: float = -0.1

    #: Symmetry ratios are reported where the reverse coupling exceeds this many error bars
    symmetry_error_bars: float = 3.0

    #: Left and right curvatures differing by more than this fraction are flagged
    asymmetry_tolerance: float = 0.2

    #: Relative fluctuation used by the noise selection rule
    fluctuation_limit: float = 0.1


class BenchConfig(ConfigSchema, prefix="bench"):

    neurons: list = [20, 40, 80]

    spikes: list = [1e4, 1e5, 1e6]

    #: Seconds; sizes not started within the budget are reported as skipped
    time_budget: float = 600.0
