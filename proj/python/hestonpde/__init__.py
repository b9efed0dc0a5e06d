# Copyright 2026 The hestonpde Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Weighted spectral-Galerkin solver for the Heston pricing PDE."""

from hestonpde._core import (  # noqa: F401
    AdmissibilityReport,
    CertReport,
    CoefficientVector,
    CoercivityConstants,
    CompletenessReport,
    EvolveResult,
    McConfig,
    McEstimate,
    ModelParams,
    OperatorMatrices,
    PathParams,
    Payoff,
    PriceSurface,
    ProjectionResult,
    QuadratureGrid,
    ShiftParams,
    SolveConfig,
    StepRecord,
    TensorBasis,
    TrajectoryReport,
    TransformedParams,
    WeightParams,
    assemble,
    black_scholes_price,
    certify_bounded,
    certify_garding,
    closed_form_price,
    coercivity_constants,
    completeness_report,
    eval_sum,
    evolve,
    evolve_along_path,
    evolve_shifted,
    in_gamma,
    mc_price,
    price_surface,
    project_payoff,
    transform,
    validate,
    weight_eval,
)

__version__ = "0.1.0"
