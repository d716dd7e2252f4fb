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

#include "pface/regressor.hpp"

#include "doctest.h"

#include <algorithm>
#include <numbers>

using namespace pface;

// A model fit to convergence on a small training set, queried with clean
// projections of its own training instances.
TEST_CASE("trained model recovers training poses through PnP")
{
    DatasetConfig dc;
    dc.n_instances = 32;
    dc.n_vertices = 300;
    dc.seed = 11;
    const SyntheticDataset s = generate_dataset(dc);
    Dataset d;
    d.topology = s.model.topology;
    for (const auto& inst : s.instances)
        d.instances.push_back({inst.id, inst.v_world, inst.pose, inst.intrinsics, inst.landmarks});

    TrainConfig cfg;
    cfg.epochs = 400;
    cfg.batch_size = 8;
    const TrainResult r = train_on_dataset(d, cfg);
    CHECK(r.epoch_loss.back() < 0.1 * r.epoch_loss.front());

    std::vector<double> angles;
    std::vector<double> shifts;
    for (const DatasetInstance& inst : d.instances) {
        const LandmarkSet2D clean = project_world(inst.vertices, inst.pose, inst.intrinsics);
        const Eigen::VectorXd f = r.model.encoding.encode(clean);
        const PosedPrediction a = predict_with_pose(r.model, f, inst.intrinsics);
        const PosedPrediction b = predict_with_pose(r.model, f, inst.intrinsics);
        CHECK(a.pnp.pose.rotation == b.pnp.pose.rotation);
        CHECK(a.pnp.pose.translation == b.pnp.pose.translation);
        CHECK(a.vertices.points == b.vertices.points);
        angles.push_back(geodesic_distance(a.pnp.pose.rotation, inst.pose.rotation) * 180 / std::numbers::pi);
        shifts.push_back((a.pnp.pose.translation - inst.pose.translation).norm());
    }
    std::ranges::sort(angles);
    std::ranges::sort(shifts);
    MESSAGE("rotation error (deg) median ", angles[angles.size() / 2], " max ", angles.back());
    MESSAGE("translation error (m) median ", shifts[shifts.size() / 2], " max ", shifts.back());
    CHECK(angles.back() < 5.0);
    CHECK(shifts.back() < 0.02);
}
