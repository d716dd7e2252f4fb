// Copyright 2026 The pface Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

/**
 * Central finite-difference checks of every analytic derivative in the
 * library: the four mesh/landmark losses, the PnP residual Jacobian and the
 * regressor's parameter and input gradients.
 */
namespace pface {

struct GradcheckResult
{
    std::string name;
    double max_relative_error = 0; ///< ||analytic - numeric||_inf / ||numeric||_inf
    double tolerance = 0;
    Eigen::Index evaluations = 0;

    bool passed() const { return max_relative_error <= tolerance; }
};

/// Central differences of f at x with step h, one coordinate at a time.
Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                 double h = 1e-6);

/// Central differences of a vector function: column j is d f / d x_j.
Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, double h = 1e-6);

double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric);

struct GradcheckOptions
{
    std::uint64_t seed = 20260;
    Eigen::Index n_points = 50;
    double step = 1e-6;
    double loss_tolerance = 1e-5;
    double model_tolerance = 1e-4;
};

GradcheckResult check_vertex_loss(const GradcheckOptions& opt = {});
GradcheckResult check_edge_loss(const GradcheckOptions& opt = {});
GradcheckResult check_landmark_loss(const GradcheckOptions& opt = {});
GradcheckResult check_total_loss(const GradcheckOptions& opt = {});
GradcheckResult check_pnp_jacobian(const GradcheckOptions& opt = {});
/// Every regressor parameter on a 3-instance batch.
GradcheckResult check_regressor_parameters(const GradcheckOptions& opt = {});
GradcheckResult check_regressor_inputs(const GradcheckOptions& opt = {});

std::vector<GradcheckResult> run_gradchecks(const GradcheckOptions& opt = {});

} // namespace pface
