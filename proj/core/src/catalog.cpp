#include "chronoscale/catalog.hpp"

#include <cmath>
#include <string>

#include "chronoscale/errors.hpp"

namespace chronoscale {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidSpec, std::string(what) + " must be finite");
    }
}

void require_size(const std::vector<double>& v, Eigen::Index n, const char* what) {
    if (static_cast<Eigen::Index>(v.size()) != n) {
        throw Error(ErrorCode::InvalidSpec, std::string(what) + " must have " + std::to_string(n) + " entries");
    }
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

std::string_view function_name(const FunctionSpec& spec) noexcept {
    return std::visit(Overloaded{
                          [](const catalog::Linear&) { return std::string_view("linear"); },
                          [](const catalog::Logistic&) { return std::string_view("logistic"); },
                          [](const catalog::Polynomial&) { return std::string_view("polynomial"); },
                          [](const catalog::Constant&) { return std::string_view("constant"); },
                          [](const catalog::Reset&) { return std::string_view("reset"); },
                      },
                      spec);
}

void validate_function(const FunctionSpec& spec, Eigen::Index n) {
    std::visit(Overloaded{
                   [n](const catalog::Linear& s) {
                       require_finite(s.rate, "rate");
                       require_finite(s.forcing, "forcing");
                       const auto size = static_cast<Eigen::Index>(s.rate.size());
                       if (size != 1 && size != n * n) {
                           throw Error(ErrorCode::InvalidSpec,
                                       "rate must be a scalar or a " + std::to_string(n) + "x" + std::to_string(n) +
                                           " matrix");
                       }
                       if (!s.forcing.empty()) require_size(s.forcing, n, "forcing");
                   },
                   [](const catalog::Logistic& s) {
                       if (!std::isfinite(s.r)) throw Error(ErrorCode::InvalidSpec, "r must be finite");
                       if (!std::isfinite(s.capacity) || s.capacity == 0.0) {
                           throw Error(ErrorCode::InvalidSpec, "capacity must be finite and nonzero");
                       }
                   },
                   [](const catalog::Polynomial& s) {
                       if (s.coefficients.empty()) throw Error(ErrorCode::InvalidSpec, "coefficients must be nonempty");
                       require_finite(s.coefficients, "coefficients");
                   },
                   [n](const catalog::Constant& s) {
                       require_finite(s.value, "value");
                       require_size(s.value, n, "value");
                   },
                   [n](const catalog::Reset& s) {
                       require_finite(s.value, "value");
                       require_size(s.value, n, "value");
                   },
               },
               spec);
}

RhsFunction instantiate(const FunctionSpec& spec, Eigen::Index n) {
    validate_function(spec, n);
    return std::visit(
        Overloaded{
            [n](const catalog::Linear& s) -> RhsFunction {
                const Vector forcing = s.forcing.empty() ? Vector::Zero(n) : to_vector(s.forcing);
                if (s.rate.size() == 1) {
                    const double rate = s.rate.front();
                    return [rate, forcing](double, const Vector& y) -> Vector { return rate * y + forcing; };
                }
                const Eigen::MatrixXd rate =
                    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                        s.rate.data(), n, n);
                return [rate, forcing](double, const Vector& y) -> Vector { return rate * y + forcing; };
            },
            [](const catalog::Logistic& s) -> RhsFunction {
                return [s](double, const Vector& y) -> Vector {
                    return (s.r * y.array() * (1.0 - y.array() / s.capacity)).matrix();
                };
            },
            [](const catalog::Polynomial& s) -> RhsFunction {
                return [s](double, const Vector& y) -> Vector {
                    Eigen::ArrayXd acc = Eigen::ArrayXd::Constant(y.size(), s.coefficients.back());
                    for (std::size_t i = s.coefficients.size() - 1; i-- > 0;) {
                        acc = acc * y.array() + s.coefficients[i];
                    }
                    return acc.matrix();
                };
            },
            [](const catalog::Constant& s) -> RhsFunction {
                const Vector value = to_vector(s.value);
                return [value](double, const Vector&) -> Vector { return value; };
            },
            [](const catalog::Reset& s) -> RhsFunction {
                const Vector value = to_vector(s.value);
                return [value](double, const Vector&) -> Vector { return value; };
            },
        },
        spec);
}

}  // namespace chronoscale
