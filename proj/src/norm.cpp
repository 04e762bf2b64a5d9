#include "anisoag/norm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace anisoag {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vec2 apply(const Mat2& A, Vec2 z) {
  return {A[0][0] * z.x + A[0][1] * z.y, A[1][0] * z.x + A[1][1] * z.y};
}

Vec2 apply_transpose(const Mat2& A, Vec2 z) {
  return {A[0][0] * z.x + A[1][0] * z.y, A[0][1] * z.x + A[1][1] * z.y};
}

double lp_value(double p, Vec2 z) {
  const double ax = std::abs(z.x);
  const double ay = std::abs(z.y);
  const double m = std::max(ax, ay);
  if (m == 0.0) return 0.0;
  const double rx = ax / m;
  const double ry = ay / m;
  return m * std::pow(std::pow(rx, p) + std::pow(ry, p), 1.0 / p);
}

Vec2 lp_gradient(double p, Vec2 z) {
  const double n = lp_value(p, z);
  if (n == 0.0) return {0.0, 0.0};
  auto comp = [&](double c) {
    return std::copysign(std::pow(std::abs(c) / n, p - 1.0), c);
  };
  return {comp(z.x), comp(z.y)};
}

Vec2 central_gradient(const std::function<double(Vec2)>& f, Vec2 z) {
  const double h = 1e-6 * std::max(z.norm(), 1e-300);
  return {(f({z.x + h, z.y}) - f({z.x - h, z.y})) / (2 * h),
          (f({z.x, z.y + h}) - f({z.x, z.y - h})) / (2 * h)};
}

}  // namespace

NormSpec NormSpec::euclidean() { return NormSpec(EuclideanNorm{}); }

NormSpec NormSpec::lp(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("lp norm requires finite p > 1, got " + std::to_string(p));
  }
  return NormSpec(LpNorm{p});
}

NormSpec NormSpec::linear_image(const Mat2& A) {
  const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  if (!(std::abs(det) > 1e-14) || !std::isfinite(det)) {
    throw std::invalid_argument("linear_image norm requires an invertible matrix");
  }
  return NormSpec(LinearImageNorm{A});
}

NormSpec NormSpec::ellipse(double ratio) {
  if (!(ratio > 0.0)) throw std::invalid_argument("ellipse ratio must be positive");
  return linear_image(Mat2{{{1.0 / ratio, 0.0}, {0.0, 1.0}}});
}

NormSpec NormSpec::custom(std::function<double(Vec2)> value, std::function<Vec2(Vec2)> gradient,
                          std::string label) {
  if (!value) throw std::invalid_argument("custom norm needs a value function");
  return NormSpec(CustomNorm{std::move(value), std::move(gradient), std::move(label)});
}

NormSpec NormSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw std::invalid_argument("norm config must be an object with a \"kind\" key");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") return euclidean();
  if (kind == "lp") {
    if (!j.contains("p")) throw std::invalid_argument("lp norm config needs \"p\"");
    return lp(j.at("p").get<double>());
  }
  if (kind == "ellipse") return ellipse(j.value("ratio", 2.0));
  if (kind == "linear_image") {
    const auto& a = j.at("A");
    if (!a.is_array() || a.size() != 2 || a[0].size() != 2 || a[1].size() != 2) {
      throw std::invalid_argument("linear_image \"A\" must be a 2x2 array");
    }
    Mat2 A{};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) A[r][c] = a[r][c].get<double>();
    return linear_image(A);
  }
  throw std::invalid_argument("unknown norm kind: " + kind);
}

NormSpec NormSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed number in norm spec: " + text);
    }
    if (used != s.size()) throw std::invalid_argument("malformed number in norm spec: " + text);
    return v;
  };
  if (head == "euclidean" && tail.empty()) return euclidean();
  if (head == "lp" && !tail.empty()) return lp(number(tail));
  if (head == "ellipse") return ellipse(tail.empty() ? 2.0 : number(tail));
  if (head == "linear") {
    std::vector<double> v;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(number(item));
    if (v.size() != 4) throw std::invalid_argument("linear norm needs 4 entries: " + text);
    return linear_image(Mat2{{{v[0], v[1]}, {v[2], v[3]}}});
  }
  throw std::invalid_argument("unknown norm: " + text);
}

nlohmann::json NormSpec::to_json() const {
  return std::visit(
      Overloaded{
          [](const EuclideanNorm&) { return nlohmann::json{{"kind", "euclidean"}}; },
          [](const LpNorm& n) { return nlohmann::json{{"kind", "lp"}, {"p", n.p}}; },
          [](const LinearImageNorm& n) {
            return nlohmann::json{{"kind", "linear_image"},
                                  {"A", {{n.A[0][0], n.A[0][1]}, {n.A[1][0], n.A[1][1]}}}};
          },
          [](const CustomNorm& n) { return nlohmann::json{{"kind", "custom"}, {"label", n.label}}; },
      },
      kind_);
}

std::string NormSpec::describe() const { return to_json().dump(); }

double NormSpec::value(Vec2 z) const {
  return std::visit(Overloaded{
                        [&](const EuclideanNorm&) { return z.norm(); },
                        [&](const LpNorm& n) { return lp_value(n.p, z); },
                        [&](const LinearImageNorm& n) { return apply(n.A, z).norm(); },
                        [&](const CustomNorm& n) { return n.value(z); },
                    },
                    kind_);
}

Vec2 NormSpec::gradient(Vec2 z) const {
  return std::visit(Overloaded{
                        [&](const EuclideanNorm&) {
                          const double r = z.norm();
                          return r == 0.0 ? Vec2{} : z / r;
                        },
                        [&](const LpNorm& n) { return lp_gradient(n.p, z); },
                        [&](const LinearImageNorm& n) {
                          const Vec2 az = apply(n.A, z);
                          const double r = az.norm();
                          return r == 0.0 ? Vec2{} : apply_transpose(n.A, az) / r;
                        },
                        [&](const CustomNorm& n) {
                          return n.gradient ? n.gradient(z) : central_gradient(n.value, z);
                        },
                    },
                    kind_);
}

void validate_norm(const NormSpec& norm, int samples) {
  const double pi = std::acos(-1.0);
  for (int k = 0; k < samples; ++k) {
    const Vec2 z = unit_at(2 * pi * (k + 0.37) / samples) * (0.5 + 0.013 * k);
    const double v = norm.value(z);
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("norm value is not positive and finite at a nonzero point");
    }
    if (std::abs(norm.value(z * 3.5) - 3.5 * v) > 1e-10 * 3.5 * v) {
      throw std::invalid_argument("norm is not positively 1-homogeneous");
    }
    if (std::abs(norm.value(-z) - v) > 1e-12 * v) {
      throw std::invalid_argument("norm is not symmetric");
    }
    const Vec2 g = norm.gradient(z);
    const double h = 1e-5 * z.norm();
    const Vec2 fd{(norm.value({z.x + h, z.y}) - norm.value({z.x - h, z.y})) / (2 * h),
                  (norm.value({z.x, z.y + h}) - norm.value({z.x, z.y - h})) / (2 * h)};
    if ((g - fd).norm() > 1e-5 * (1.0 + g.norm())) {
      throw std::invalid_argument("norm gradient disagrees with finite differences");
    }
  }
}

}  // namespace anisoag
