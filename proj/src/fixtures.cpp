#include <cmath>
#include <numbers>
#include <random>

#include "seggrasp/error.hpp"
#include "seggrasp/eval.hpp"
#include "seggrasp/primitives.hpp"

namespace seggrasp {

const char* to_string(Archetype archetype) {
  switch (archetype) {
    case Archetype::Hammer: return "hammer";
    case Archetype::Mug: return "mug";
    case Archetype::Knife: return "knife";
    case Archetype::Dumbbell: return "dumbbell";
  }
  return "hammer";
}

Archetype parse_archetype(const std::string& name) {
  for (Archetype a : {Archetype::Hammer, Archetype::Mug, Archetype::Knife, Archetype::Dumbbell}) {
    if (name == to_string(a)) return a;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown archetype '" + name + "'");
}

namespace {

constexpr double kCell = 0.03;

struct Assembly {
  std::vector<TriMesh> pieces;
  std::vector<int> piece_label;

  void add(TriMesh mesh, int label) {
    pieces.push_back(std::move(mesh));
    piece_label.push_back(label);
  }
};

Eigen::Isometry3d rotation_about(const Vec3& axis, double angle) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.rotate(Eigen::AngleAxisd(angle, axis.normalized()));
  return t;
}

Eigen::Isometry3d translation(const Vec3& offset) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translate(offset);
  return t;
}

}  // namespace

Fixture make_fixture(Archetype archetype, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto around = [&](double nominal, double spread) { return nominal * (1.0 + spread * (2.0 * unit(rng) - 1.0)); };

  Fixture fx;
  fx.archetype = archetype;
  fx.seed = seed;
  Assembly parts;

  switch (archetype) {
    case Archetype::Hammer: {
      fx.prompts = PromptSet({"handle", "head"});
      const double length = around(1.0, 0.1);
      const double hw = around(0.05, 0.2);
      const double hd = around(0.045, 0.2);
      const double head_half = around(0.27, 0.15);
      const double head_h = around(0.16, 0.15);
      const double head_d = around(0.07, 0.15);
      // Handle reaches slightly into the head so no faces are coplanar.
      parts.add(make_box(Vec3(-hw, 0.0, -hd), Vec3(hw, length + 0.3 * head_h, hd), kCell), 0);
      parts.add(make_box(Vec3(-head_half, length, -head_d), Vec3(head_half, length + head_h, head_d), kCell), 1);
      fx.grasp_width = 2.0 * std::max(hw, hd) * 1.6;
      break;
    }
    case Archetype::Mug: {
      fx.prompts = PromptSet({"handle", "body"});
      const double radius = around(0.32, 0.12);
      const double height = around(0.9, 0.1);
      const double arc = around(0.28, 0.12);
      const double tube = around(0.045, 0.15);
      parts.add(make_prism(radius, 0.0, height, 28, 10), 1);
      const double sweep = 80.0 * std::numbers::pi / 180.0;
      // Arc drawn in the xy-plane, stood up into xz, then pushed against the body wall.
      TriMesh handle = make_tube_arc(arc, tube, -sweep, sweep, 16, 10);
      handle = transformed(handle, rotation_about(Vec3::UnitX(), 0.5 * std::numbers::pi));
      handle = transformed(handle, translation(Vec3(radius - 0.3 * arc, 0.0, 0.5 * height)));
      parts.add(std::move(handle), 0);
      fx.grasp_width = 2.0 * tube * 1.6;
      break;
    }
    case Archetype::Knife: {
      fx.prompts = PromptSet({"handle", "blade"});
      const double handle_len = around(0.38, 0.1);
      const double handle_w = around(0.035, 0.15);
      const double handle_h = around(0.05, 0.15);
      const double blade_len = around(0.62, 0.1);
      const double blade_t = around(0.009, 0.15);
      const double blade_h = around(0.075, 0.15);
      parts.add(make_box(Vec3(0.0, -handle_w, -handle_h), Vec3(handle_len, handle_w, handle_h), kCell), 0);
      parts.add(make_box(Vec3(handle_len - 0.03, -blade_t, -blade_h), Vec3(handle_len + blade_len, blade_t, blade_h),
                         kCell),
                1);
      fx.grasp_width = 2.0 * std::max(handle_w, handle_h) * 1.6;
      break;
    }
    case Archetype::Dumbbell: {
      fx.prompts = PromptSet({"handle", "weight"});
      const double bar_r = around(0.055, 0.15);
      const double half_len = around(0.42, 0.1);
      const double ball_r = around(0.21, 0.12);
      TriMesh bar = make_prism(bar_r, -half_len, half_len, 16, 24);
      bar = transformed(bar, rotation_about(Vec3::UnitY(), 0.5 * std::numbers::pi));
      parts.add(std::move(bar), 0);
      parts.add(make_icosphere(Vec3(-half_len - 0.6 * ball_r, 0, 0), ball_r, 3), 1);
      parts.add(make_icosphere(Vec3(half_len + 0.6 * ball_r, 0, 0), ball_r, 3), 1);
      fx.grasp_width = 2.0 * bar_r * 1.6;
      break;
    }
  }

  // Uniform random rotation (Shoemake).
  const double u1 = unit(rng), u2 = unit(rng), u3 = unit(rng);
  const Eigen::Quaterniond q(std::sqrt(u1) * std::cos(2 * std::numbers::pi * u3),
                             std::sqrt(1 - u1) * std::sin(2 * std::numbers::pi * u2),
                             std::sqrt(1 - u1) * std::cos(2 * std::numbers::pi * u2),
                             std::sqrt(u1) * std::sin(2 * std::numbers::pi * u3));
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  pose.rotate(q.normalized());

  for (std::size_t p = 0; p < parts.pieces.size(); ++p) {
    for (int f = 0; f < parts.pieces[p].face_count(); ++f) fx.labels.face_label.push_back(parts.piece_label[p]);
  }
  fx.mesh = transformed(concatenate(parts.pieces), pose);
  return fx;
}

}  // namespace seggrasp
