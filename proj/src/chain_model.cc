// Copyright 2026 The mcmppi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcmppi/chain_model.h"

#include <utility>

#include <yaml-cpp/yaml.h>

namespace mcmppi {
namespace {

constexpr int kModelVersion = 1;

Eigen::VectorXd ReadVector(const YAML::Node& node, const std::string& what) {
  if (!node || !node.IsSequence()) {
    throw ModelError("model: expected a list for '" + what + "'");
  }
  Eigen::VectorXd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) v(i) = node[i].as<double>();
  return v;
}

Eigen::Vector3d ReadVector3(const YAML::Node& node, const std::string& what,
                            int expected) {
  const Eigen::VectorXd v = ReadVector(node, what);
  if (v.size() != expected) {
    throw ModelError("model: '" + what + "' needs " + std::to_string(expected) +
                     " entries");
  }
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  out.head(expected) = v;
  return out;
}

JointSpec ParseJoint(const YAML::Node& node, Group group) {
  JointSpec joint;
  if (group == Group::kSE2) {
    const double link = node["link"] ? node["link"].as<double>() : 0.0;
    const double angle = node["angle"] ? node["angle"].as<double>() : 0.0;
    joint.fixed = Transform::Planar(angle, Eigen::Vector2d(link, 0.0));
  } else {
    // Modified Denavit-Hartenberg: RotX(alpha) TransX(a) TransZ(d) RotZ(theta).
    const double a = node["a"] ? node["a"].as<double>() : 0.0;
    const double alpha = node["alpha"] ? node["alpha"].as<double>() : 0.0;
    const double d = node["d"] ? node["d"].as<double>() : 0.0;
    const double theta = node["theta"] ? node["theta"].as<double>() : 0.0;
    joint.fixed =
        Transform::Spatial(RotX(alpha) * RotZ(theta),
                           RotX(alpha) * Eigen::Vector3d(a, 0.0, 0.0) +
                               RotX(alpha) * Eigen::Vector3d(0.0, 0.0, d));
  }
  if (!node["lower"] || !node["upper"]) {
    throw ModelError("model: every joint needs 'lower' and 'upper'");
  }
  joint.lower = node["lower"].as<double>();
  joint.upper = node["upper"].as<double>();
  if (!(joint.lower < joint.upper)) {
    throw ModelError("model: joint lower bound must be below upper bound");
  }
  return joint;
}

ArmModel ParseArm(const YAML::Node& node, const std::string& name,
                  Group group) {
  if (!node) throw ModelError("model: missing arm '" + name + "'");
  ArmModel arm;
  arm.name = name;
  arm.base = ParsePose(node["base"], group);
  arm.tool = node["tool"] ? ParsePose(node["tool"], group)
                          : Transform::Identity(group);
  if (!node["joints"] || node["joints"].size() == 0) {
    throw ModelError("model: arm '" + name + "' has no joints");
  }
  for (const auto& j : node["joints"]) arm.joints.push_back(ParseJoint(j, group));
  if (node["elbow_sign"]) arm.elbow_sign = node["elbow_sign"].as<int>() >= 0 ? 1 : -1;
  return arm;
}

std::vector<CollisionSphere> ParseSpheres(const YAML::Node& node, int arm,
                                          Group group) {
  std::vector<CollisionSphere> out;
  if (!node) return out;
  const int dim = group == Group::kSE2 ? 2 : 3;
  for (const auto& s : node) {
    CollisionSphere sphere;
    sphere.arm = arm;
    sphere.link = s["link"] ? s["link"].as<int>() : 0;
    sphere.center = ReadVector3(s["center"], "center", dim);
    sphere.radius = s["radius"].as<double>();
    if (!(sphere.radius > 0.0)) throw ModelError("model: sphere radius must be > 0");
    out.push_back(sphere);
  }
  return out;
}

}  // namespace

Transform ParsePose(const YAML::Node& node, Group group) {
  if (!node) return Transform::Identity(group);
  if (group == Group::kSE2) {
    const Eigen::Vector3d xy =
        node["xy"] ? ReadVector3(node["xy"], "xy", 2) : Eigen::Vector3d::Zero();
    const double angle = node["angle"] ? node["angle"].as<double>() : 0.0;
    return Transform::Planar(angle, xy.head<2>());
  }
  const Eigen::Vector3d xyz =
      node["xyz"] ? ReadVector3(node["xyz"], "xyz", 3) : Eigen::Vector3d::Zero();
  const Eigen::Vector3d rpy =
      node["rpy"] ? ReadVector3(node["rpy"], "rpy", 3) : Eigen::Vector3d::Zero();
  return Transform::Spatial(RotZ(rpy.z()) * RotY(rpy.y()) * RotX(rpy.x()), xyz);
}

ChainModel::ChainModel(std::string id, Group group, ArmModel left,
                       ArmModel right, Transform grasp,
                       std::vector<CollisionSphere> spheres,
                       Eigen::VectorXd home, Eigen::VectorXd neutral)
    : id_(std::move(id)),
      group_(group),
      left_(std::move(left)),
      right_(std::move(right)),
      grasp_(std::move(grasp)),
      spheres_(std::move(spheres)),
      home_(std::move(home)),
      neutral_(std::move(neutral)) {
  const int n = static_cast<int>(left_.joints.size() + right_.joints.size());
  lower_.resize(n);
  upper_.resize(n);
  int i = 0;
  for (const ArmModel* arm : {&left_, &right_}) {
    if (arm->base.group() != group_ || arm->tool.group() != group_) {
      throw ModelError("model: arm transforms must match the model group");
    }
    for (const JointSpec& j : arm->joints) {
      lower_(i) = j.lower;
      upper_(i) = j.upper;
      ++i;
    }
  }
  if (grasp_.group() != group_) {
    throw ModelError("model: grasp transform must match the model group");
  }
  if (home_.size() != n) {
    throw ModelError("model: home pose needs " + std::to_string(n) + " entries");
  }
  if (neutral_.size() == 0) neutral_ = home_;
  if (neutral_.size() != n) {
    throw ModelError("model: neutral pose needs " + std::to_string(n) +
                     " entries");
  }
  if (manifold_dim() <= 0) {
    throw ModelError("model: fewer joints than constraints");
  }
}

bool ChainModel::WithinBounds(const Configuration& q, double slack) const {
  return q.size() == joint_count() &&
         ((q.array() >= lower_.array() - slack) &&
          (q.array() <= upper_.array() + slack))
             .all();
}

Configuration ChainModel::Clamp(const Configuration& q) const {
  return q.cwiseMax(lower_).cwiseMin(upper_);
}

ChainModel ParseChainModel(const YAML::Node& root) {
  if (!root["version"] || root["version"].as<int>() != kModelVersion) {
    throw ModelError("model: unsupported or missing schema version");
  }
  const std::string group_name = root["group"].as<std::string>("SE3");
  Group group;
  if (group_name == "SE2") {
    group = Group::kSE2;
  } else if (group_name == "SE3") {
    group = Group::kSE3;
  } else {
    throw ModelError("model: group must be SE2 or SE3");
  }
  if (group == Group::kSE3 && root["euler_convention"] &&
      root["euler_convention"].as<std::string>() != "ZYX") {
    throw ModelError("model: only the ZYX tray euler convention is supported");
  }
  ArmModel left = ParseArm(root["arms"]["left"], "left", group);
  ArmModel right = ParseArm(root["arms"]["right"], "right", group);
  std::vector<CollisionSphere> spheres;
  for (const auto& [key, arm] :
       {std::pair{"left", CollisionSphere::kLeft},
        std::pair{"right", CollisionSphere::kRight}}) {
    auto s = ParseSpheres(root["arms"][key]["spheres"], arm, group);
    spheres.insert(spheres.end(), s.begin(), s.end());
  }
  if (root["tray"]) {
    auto s = ParseSpheres(root["tray"]["spheres"], CollisionSphere::kTray, group);
    spheres.insert(spheres.end(), s.begin(), s.end());
  }
  Eigen::VectorXd home = ReadVector(root["home"], "home");
  Eigen::VectorXd neutral =
      root["neutral"] ? ReadVector(root["neutral"], "neutral") : Eigen::VectorXd();
  return ChainModel(root["id"].as<std::string>("unnamed"), group,
                    std::move(left), std::move(right),
                    ParsePose(root["grasp"], group), std::move(spheres),
                    std::move(home), std::move(neutral));
}

ChainModel LoadChainModel(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ModelError("model: cannot read '" + path + "': " + e.what());
  }
  try {
    return ParseChainModel(root);
  } catch (const YAML::Exception& e) {
    throw ModelError("model: malformed '" + path + "': " + e.what());
  }
}

}  // namespace mcmppi
