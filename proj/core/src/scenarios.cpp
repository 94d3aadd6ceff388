#include "nfg/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "nfg/errors.hpp"
#include "nfg/graph_io.hpp"
#include "nfg/random.hpp"

namespace nfg {

namespace {

constexpr double kStepLength = 5.0;
constexpr double kLandmarkOffset = 10.0;
constexpr double kAnchorSigmaXy = 0.1;
constexpr double kAnchorSigmaTheta = 0.05;
constexpr double kWideSigmaXy = 5.0;
constexpr double kWideSigmaTheta = 0.8;
constexpr double kLandmarkPriorSigma = 8.0;
constexpr double kSigmaFloor = 1e-9;

double floored(double sigma) { return std::max(sigma, kSigmaFloor); }

// With every requested noise scale at zero the scenario is exact: prior
// means are placed at truth as well, so all residuals vanish.
double noise_gate(const ScenarioSpec& spec) {
  return (spec.odom_sigma_xy == 0.0 && spec.odom_sigma_theta == 0.0 && spec.range_sigma == 0.0)
             ? 0.0
             : 1.0;
}

Eigen::Matrix3d diag_cov3(double sxy, double stheta) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  c(0, 0) = sxy * sxy;
  c(1, 1) = sxy * sxy;
  c(2, 2) = stheta * stheta;
  return c;
}

Eigen::Matrix2d diag_cov2(double s) {
  return Eigen::Matrix2d::Identity() * (s * s);
}

Pose2 perturb_pose(const Pose2& truth, double sxy, double stheta, Rng& rng) {
  const TangentVec3 xi{sxy * rng.normal(), sxy * rng.normal(), stheta * rng.normal()};
  return se2_compose(truth, se2_exp(xi));
}

Point2 perturb_point(const Point2& truth, double s, Rng& rng) {
  return Point2{truth.x + s * rng.normal(), truth.y + s * rng.normal()};
}

double noisy_range(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double sigma, Rng& rng) {
  return (a - b).norm() + sigma * rng.normal();
}

struct MetaBuilder {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
  void add(const std::string& key, double value) { entries.emplace_back(key, format_double(value)); }
  void add(const std::string& key, long value) { entries.emplace_back(key, std::to_string(value)); }
};

void check(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "scenario: " + message);
}

GeneratedScenario make_pose_graph(const ScenarioSpec& spec) {
  const int n_poses = spec.poses > 0 ? spec.poses : 6;
  const int n_loops = spec.loops >= 0 ? spec.loops : 4;
  check(n_poses >= 2, "pose graph needs at least 2 poses");

  Rng rng(derive_seed(spec.seed, 0x9c));

  // Random-walk trajectory: fixed step length, uniform per-step turns.
  std::vector<Pose2> truth;
  truth.emplace_back(0.0, 0.0, 0.0);
  for (int t = 1; t < n_poses; ++t) {
    const double turn = rng.uniform(-0.6, 0.6);
    const Pose2 step(kStepLength, 0.0, turn);
    truth.push_back(se2_compose(truth.back(), step));
  }

  // Loop-closure candidates: non-adjacent pairs, nearest in truth first.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n_poses; ++i) {
    for (int j = i + 2; j < n_poses; ++j) pairs.emplace_back(i, j);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    const double da = (truth[a.second].translation() - truth[a.first].translation()).norm();
    const double db = (truth[b.second].translation() - truth[b.first].translation()).norm();
    return da < db;
  });
  check(n_loops <= static_cast<int>(pairs.size()),
        "requested more loop closures than non-adjacent pose pairs");

  GeneratedScenario out;
  FactorGraph& g = out.graph;
  for (int t = 0; t < n_poses; ++t) g.add_variable("x" + std::to_string(t), VarKind::kPose2);

  const double gate = noise_gate(spec);
  const Eigen::Matrix3d prior_cov = diag_cov3(floored(kAnchorSigmaXy), floored(kAnchorSigmaTheta));
  g.add_factor({"x0"},
               PriorPose2{perturb_pose(truth[0], gate * kAnchorSigmaXy, gate * kAnchorSigmaTheta, rng),
                          prior_cov});

  const Eigen::Matrix3d odom_cov =
      diag_cov3(floored(spec.odom_sigma_xy), floored(spec.odom_sigma_theta));
  for (int t = 0; t + 1 < n_poses; ++t) {
    const Pose2 rel = se2_between(truth[t], truth[t + 1]);
    g.add_factor({"x" + std::to_string(t), "x" + std::to_string(t + 1)},
                 OdometryPose2{perturb_pose(rel, spec.odom_sigma_xy, spec.odom_sigma_theta, rng),
                               odom_cov});
  }
  for (int k = 0; k < n_loops; ++k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    const Pose2 rel = se2_between(truth[i], truth[j]);
    g.add_factor({"x" + std::to_string(i), "x" + std::to_string(j)},
                 OdometryPose2{perturb_pose(rel, spec.odom_sigma_xy, spec.odom_sigma_theta, rng),
                               odom_cov});
  }
  for (int t = 0; t < n_poses; ++t) g.set_truth("x" + std::to_string(t), truth[t]);

  MetaBuilder meta;
  meta.add("family", family_name(spec.family));
  meta.add("seed", static_cast<long>(spec.seed));
  meta.add("poses", static_cast<long>(n_poses));
  meta.add("loop_closures", static_cast<long>(n_loops));
  meta.add("step_length_m", kStepLength);
  meta.add("prior_sigma_xy_m", kAnchorSigmaXy);
  meta.add("prior_sigma_theta_rad", kAnchorSigmaTheta);
  meta.add("odom_sigma_xy_m", spec.odom_sigma_xy);
  meta.add("odom_sigma_theta_rad", spec.odom_sigma_theta);
  out.metadata = std::move(meta.entries);
  return out;
}

GeneratedScenario make_range_only(const ScenarioSpec& spec) {
  const int n_poses = spec.poses > 0 ? spec.poses : 4;
  check(n_poses >= 2, "range-only needs at least 2 poses");
  const int last_step = spec.steps >= 0 ? spec.steps : n_poses - 1;
  check(last_step >= 0 && last_step < n_poses, "steps out of range");

  Rng rng(derive_seed(spec.seed, 0x70));

  // Poses 0..n-2 drive a straight line; the final pose breaks away.
  std::vector<Pose2> truth;
  truth.emplace_back(0.0, 0.0, 0.0);
  for (int t = 1; t < n_poses; ++t) {
    const double turn = (t == n_poses - 1) ? 1.0 : 0.0;
    truth.push_back(se2_compose(truth.back(), Pose2(kStepLength, 0.0, turn)));
  }
  const Point2 landmark{kStepLength * (n_poses - 2) / 2.0, kLandmarkOffset};

  GeneratedScenario out;
  FactorGraph& g = out.graph;
  for (int t = 0; t <= last_step; ++t) g.add_variable("x" + std::to_string(t), VarKind::kPose2);
  g.add_variable("l0", VarKind::kPoint2);

  const double gate = noise_gate(spec);
  const Eigen::Matrix3d prior_cov = diag_cov3(floored(kAnchorSigmaXy), floored(kAnchorSigmaTheta));
  const Eigen::Matrix3d odom_cov =
      diag_cov3(floored(spec.odom_sigma_xy), floored(spec.odom_sigma_theta));
  const double range_sigma = floored(spec.range_sigma);

  g.add_factor({"x0"},
               PriorPose2{perturb_pose(truth[0], gate * kAnchorSigmaXy, gate * kAnchorSigmaTheta, rng),
                          prior_cov});
  for (int t = 0; t + 1 < n_poses; ++t) {
    const Pose2 rel = se2_between(truth[t], truth[t + 1]);
    const OdometryPose2 odom{
        perturb_pose(rel, spec.odom_sigma_xy, spec.odom_sigma_theta, rng), odom_cov};
    if (t + 1 <= last_step) {
      g.add_factor({"x" + std::to_string(t), "x" + std::to_string(t + 1)}, odom);
    }
  }
  for (int t = 0; t < n_poses; ++t) {
    const double z = noisy_range(truth[t].translation(), landmark.vec(), spec.range_sigma, rng);
    if (t <= last_step) {
      g.add_factor({"x" + std::to_string(t), "l0"}, Range{z, range_sigma});
    }
  }
  for (int t = 0; t <= last_step; ++t) g.set_truth("x" + std::to_string(t), truth[t]);
  g.set_truth("l0", landmark);

  MetaBuilder meta;
  meta.add("family", family_name(spec.family));
  meta.add("seed", static_cast<long>(spec.seed));
  meta.add("poses", static_cast<long>(n_poses));
  meta.add("emitted_through_step", static_cast<long>(last_step));
  meta.add("step_length_m", kStepLength);
  meta.add("landmark_offset_m", kLandmarkOffset);
  meta.add("landmark_x_m", landmark.x);
  meta.add("landmark_y_m", landmark.y);
  meta.add("prior_sigma_xy_m", kAnchorSigmaXy);
  meta.add("prior_sigma_theta_rad", kAnchorSigmaTheta);
  meta.add("odom_sigma_xy_m", spec.odom_sigma_xy);
  meta.add("odom_sigma_theta_rad", spec.odom_sigma_theta);
  meta.add("range_sigma_m", spec.range_sigma);
  out.metadata = std::move(meta.entries);
  return out;
}

GeneratedScenario make_multi_robot(const ScenarioSpec& spec) {
  const int n_robots = spec.robots > 0 ? spec.robots : 3;
  const int n_steps = spec.poses > 0 ? spec.poses : 6;  // time steps per robot
  check(n_robots >= 2, "multi-robot needs at least 2 robots");
  check(n_steps >= 1, "multi-robot needs at least 1 time step");
  const int last_step = spec.steps >= 0 ? spec.steps : n_steps - 1;
  check(last_step >= 0 && last_step < n_steps, "steps out of range");

  Rng rng(derive_seed(spec.seed, 0x33));

  // Staggered starts with distinct headings and turn rates so trajectories
  // curve differently; simultaneous pairwise ranges then fix the mirror
  // ambiguity once two steps of geometry exist.
  std::vector<std::vector<Pose2>> truth(n_robots);
  for (int r = 0; r < n_robots; ++r) {
    const double heading0 = 0.25 * ((r % 3) - 1);
    const double turn = 0.12 - 0.08 * (r % 3);
    truth[r].emplace_back(0.0, 12.0 * r, heading0);
    for (int t = 1; t < n_steps; ++t) {
      truth[r].push_back(se2_compose(truth[r].back(), Pose2(kStepLength, 0.0, turn)));
    }
  }

  auto name = [](int r, int t) { return "x" + std::to_string(r) + "_" + std::to_string(t); };

  GeneratedScenario out;
  FactorGraph& g = out.graph;
  for (int r = 0; r < n_robots; ++r) {
    for (int t = 0; t <= last_step; ++t) g.add_variable(name(r, t), VarKind::kPose2);
  }

  const Eigen::Matrix3d anchor_cov =
      diag_cov3(floored(kAnchorSigmaXy), floored(kAnchorSigmaTheta));
  const Eigen::Matrix3d wide_cov = diag_cov3(floored(kWideSigmaXy), floored(kWideSigmaTheta));
  const Eigen::Matrix3d odom_cov =
      diag_cov3(floored(spec.odom_sigma_xy), floored(spec.odom_sigma_theta));
  const double range_sigma = floored(spec.range_sigma);

  // The first robot anchors the frame; the rest start with wide priors.
  const double gate = noise_gate(spec);
  for (int r = 0; r < n_robots; ++r) {
    const double sxy = r == 0 ? kAnchorSigmaXy : kWideSigmaXy;
    const double sth = r == 0 ? kAnchorSigmaTheta : kWideSigmaTheta;
    g.add_factor({name(r, 0)}, PriorPose2{perturb_pose(truth[r][0], gate * sxy, gate * sth, rng),
                                          r == 0 ? anchor_cov : wide_cov});
  }
  for (int t = 0; t + 1 < n_steps; ++t) {
    for (int r = 0; r < n_robots; ++r) {
      const Pose2 rel = se2_between(truth[r][t], truth[r][t + 1]);
      const OdometryPose2 odom{
          perturb_pose(rel, spec.odom_sigma_xy, spec.odom_sigma_theta, rng), odom_cov};
      if (t + 1 <= last_step) g.add_factor({name(r, t), name(r, t + 1)}, odom);
    }
  }
  for (int t = 0; t < n_steps; ++t) {
    for (int r1 = 0; r1 < n_robots; ++r1) {
      for (int r2 = r1 + 1; r2 < n_robots; ++r2) {
        const double z = noisy_range(truth[r1][t].translation(), truth[r2][t].translation(),
                                     spec.range_sigma, rng);
        if (t <= last_step) g.add_factor({name(r1, t), name(r2, t)}, Range{z, range_sigma});
      }
    }
  }
  for (int r = 0; r < n_robots; ++r) {
    for (int t = 0; t <= last_step; ++t) g.set_truth(name(r, t), truth[r][t]);
  }

  MetaBuilder meta;
  meta.add("family", family_name(spec.family));
  meta.add("seed", static_cast<long>(spec.seed));
  meta.add("robots", static_cast<long>(n_robots));
  meta.add("steps", static_cast<long>(n_steps));
  meta.add("emitted_through_step", static_cast<long>(last_step));
  meta.add("step_length_m", kStepLength);
  meta.add("lane_spacing_m", 12.0);
  meta.add("anchor_sigma_xy_m", kAnchorSigmaXy);
  meta.add("anchor_sigma_theta_rad", kAnchorSigmaTheta);
  meta.add("wide_sigma_xy_m", kWideSigmaXy);
  meta.add("wide_sigma_theta_rad", kWideSigmaTheta);
  meta.add("odom_sigma_xy_m", spec.odom_sigma_xy);
  meta.add("odom_sigma_theta_rad", spec.odom_sigma_theta);
  meta.add("range_sigma_m", spec.range_sigma);
  out.metadata = std::move(meta.entries);
  return out;
}

GeneratedScenario make_ambiguous(const ScenarioSpec& spec) {
  const int n_poses = spec.poses > 0 ? spec.poses : 8;
  check(n_poses >= 5, "ambiguous scenario needs at least 5 poses");
  const int last_step = spec.steps >= 0 ? spec.steps : n_poses - 1;
  check(last_step >= 0 && last_step < n_poses, "steps out of range");

  Rng rng(derive_seed(spec.seed, 0xda));

  // Straight drive past two beacons on opposite sides. Poses 1-4 measure an
  // ambiguous beacon; later poses measure known beacons, which disambiguates
  // the earlier associations.
  std::vector<Pose2> truth;
  for (int t = 0; t < n_poses; ++t) truth.emplace_back(kStepLength * t, 0.0, 0.0);
  const Point2 beacon_a{8.0, 9.0};
  const Point2 beacon_b{22.0, -7.0};
  // True association of the ambiguous measurements from poses 1..4.
  auto true_beacon = [&](int t) -> const Point2& { return t <= 2 ? beacon_a : beacon_b; };

  GeneratedScenario out;
  FactorGraph& g = out.graph;
  for (int t = 0; t <= last_step; ++t) g.add_variable("x" + std::to_string(t), VarKind::kPose2);
  g.add_variable("l0", VarKind::kPoint2);
  g.add_variable("l1", VarKind::kPoint2);

  const Eigen::Matrix3d prior_cov = diag_cov3(floored(kAnchorSigmaXy), floored(kAnchorSigmaTheta));
  const Eigen::Matrix2d landmark_cov = diag_cov2(floored(kLandmarkPriorSigma));
  const Eigen::Matrix3d odom_cov =
      diag_cov3(floored(spec.odom_sigma_xy), floored(spec.odom_sigma_theta));
  const double range_sigma = floored(spec.range_sigma);

  const double gate = noise_gate(spec);
  g.add_factor({"x0"},
               PriorPose2{perturb_pose(truth[0], gate * kAnchorSigmaXy, gate * kAnchorSigmaTheta, rng),
                          prior_cov});
  g.add_factor({"l0"},
               PriorPoint2{perturb_point(beacon_a, gate * kLandmarkPriorSigma, rng), landmark_cov});
  g.add_factor({"l1"},
               PriorPoint2{perturb_point(beacon_b, gate * kLandmarkPriorSigma, rng), landmark_cov});

  for (int t = 0; t + 1 < n_poses; ++t) {
    const Pose2 rel = se2_between(truth[t], truth[t + 1]);
    const OdometryPose2 odom{
        perturb_pose(rel, spec.odom_sigma_xy, spec.odom_sigma_theta, rng), odom_cov};
    if (t + 1 <= last_step) {
      g.add_factor({"x" + std::to_string(t), "x" + std::to_string(t + 1)}, odom);
    }
  }
  for (int t = 1; t < n_poses; ++t) {
    const bool ambiguous = t <= 4;
    const Point2& target =
        ambiguous ? true_beacon(t) : (t % 2 == 0 ? beacon_b : beacon_a);
    const double z = noisy_range(truth[t].translation(), target.vec(), spec.range_sigma, rng);
    if (t > last_step) continue;
    const std::string pose = "x" + std::to_string(t);
    if (ambiguous) {
      g.add_factor({pose, "l0", "l1"}, AmbiguousRange{z, range_sigma});
    } else {
      g.add_factor({pose, t % 2 == 0 ? "l1" : "l0"}, Range{z, range_sigma});
    }
  }
  for (int t = 0; t <= last_step; ++t) g.set_truth("x" + std::to_string(t), truth[t]);
  g.set_truth("l0", beacon_a);
  g.set_truth("l1", beacon_b);

  MetaBuilder meta;
  meta.add("family", family_name(spec.family));
  meta.add("seed", static_cast<long>(spec.seed));
  meta.add("poses", static_cast<long>(n_poses));
  meta.add("emitted_through_step", static_cast<long>(last_step));
  meta.add("step_length_m", kStepLength);
  meta.add("beacon_a_x_m", beacon_a.x);
  meta.add("beacon_a_y_m", beacon_a.y);
  meta.add("beacon_b_x_m", beacon_b.x);
  meta.add("beacon_b_y_m", beacon_b.y);
  meta.add("ambiguous_poses", "x1..x4");
  meta.add("landmark_prior_sigma_m", kLandmarkPriorSigma);
  meta.add("prior_sigma_xy_m", kAnchorSigmaXy);
  meta.add("prior_sigma_theta_rad", kAnchorSigmaTheta);
  meta.add("odom_sigma_xy_m", spec.odom_sigma_xy);
  meta.add("odom_sigma_theta_rad", spec.odom_sigma_theta);
  meta.add("range_sigma_m", spec.range_sigma);
  out.metadata = std::move(meta.entries);
  return out;
}

}  // namespace

ScenarioSpec::Family parse_family(const std::string& name) {
  if (name == "pose_graph") return ScenarioSpec::Family::kPoseGraph;
  if (name == "range_only") return ScenarioSpec::Family::kRangeOnly;
  if (name == "multi_robot_range") return ScenarioSpec::Family::kMultiRobotRange;
  if (name == "ambiguous_range") return ScenarioSpec::Family::kAmbiguousRange;
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario family '" + name + "'");
}

std::string family_name(ScenarioSpec::Family family) {
  switch (family) {
    case ScenarioSpec::Family::kPoseGraph: return "pose_graph";
    case ScenarioSpec::Family::kRangeOnly: return "range_only";
    case ScenarioSpec::Family::kMultiRobotRange: return "multi_robot_range";
    case ScenarioSpec::Family::kAmbiguousRange: return "ambiguous_range";
  }
  return "unknown";
}

GeneratedScenario generate_scenario(const ScenarioSpec& spec) {
  if (spec.odom_sigma_xy < 0.0 || spec.odom_sigma_theta < 0.0 || spec.range_sigma < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "scenario noise scales must be >= 0");
  }
  switch (spec.family) {
    case ScenarioSpec::Family::kPoseGraph: return make_pose_graph(spec);
    case ScenarioSpec::Family::kRangeOnly: return make_range_only(spec);
    case ScenarioSpec::Family::kMultiRobotRange: return make_multi_robot(spec);
    case ScenarioSpec::Family::kAmbiguousRange: return make_ambiguous(spec);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario family");
}

}  // namespace nfg
