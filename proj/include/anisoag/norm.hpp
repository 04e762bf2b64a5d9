#pragma once
/**
 * @file norm.hpp
 * @brief Strictly convex C¹ norms on the plane.
 *
 * A NormSpec is a value type describing one of the builtin families or a
 * user-supplied value function. Evaluation never rescales; the perimeter
 * normalization lives in BoundaryParam.
 */

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "anisoag/vec2.hpp"

namespace anisoag {

using Mat2 = std::array<std::array<double, 2>, 2>;

struct EuclideanNorm {};

struct LpNorm {
  double p = 2.0;
};

/// ‖z‖ = |A z| for an invertible A.
struct LinearImageNorm {
  Mat2 A{{{1.0, 0.0}, {0.0, 1.0}}};
};

struct CustomNorm {
  std::function<double(Vec2)> value;
  /// Optional; central differences with step 1e-6·|z| are used when absent.
  std::function<Vec2(Vec2)> gradient;
  std::string label = "custom";
};

class NormSpec {
 public:
  using Kind = std::variant<EuclideanNorm, LpNorm, LinearImageNorm, CustomNorm>;

  NormSpec() = default;

  static NormSpec euclidean();
  static NormSpec lp(double p);
  static NormSpec linear_image(const Mat2& A);
  /// Ellipse with semi-axes `ratio` (first axis) and 1: linear_image(diag(1/ratio, 1)).
  static NormSpec ellipse(double ratio);
  static NormSpec custom(std::function<double(Vec2)> value,
                         std::function<Vec2(Vec2)> gradient = {},
                         std::string label = "custom");

  /// {"kind": "lp", "p": 4.0}, {"kind": "linear_image", "A": [[..],[..]]},
  /// {"kind": "euclidean"}, {"kind": "ellipse", "ratio": 2.0}.
  static NormSpec from_json(const nlohmann::json& j);
  /// Short form used on the command line: "euclidean", "lp:3", "ellipse:2",
  /// "linear:a11,a12,a21,a22".
  static NormSpec parse(const std::string& text);

  /// Custom norms serialize as {"kind": "custom", "label": ...} and cannot be read back.
  nlohmann::json to_json() const;
  std::string describe() const;

  double value(Vec2 z) const;
  Vec2 gradient(Vec2 z) const;

  const Kind& kind() const { return kind_; }

 private:
  explicit NormSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_{EuclideanNorm{}};
};

/// Spot-checks the NormSpec invariants (homogeneity, symmetry, gradient
/// consistency) on `samples` directions. Throws std::invalid_argument on failure.
void validate_norm(const NormSpec& norm, int samples = 64);

}  // namespace anisoag
