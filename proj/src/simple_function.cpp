#include "siolab/simple_function.hpp"

#include <sstream>
#include <stdexcept>

namespace siolab {

SimpleFunction::SimpleFunction(SimpleSpace space, std::vector<Term> terms) : space_(space), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.shape.is_ball() != (space_ == SimpleSpace::Balls))
            throw std::invalid_argument("simple function: shape kind does not match the function space");
        if (t.shape.dim() != terms_.front().shape.dim())
            throw std::invalid_argument("simple function: mixed dimensions");
    }
}

SimpleFunction SimpleFunction::indicator(const Shape& shape, double coefficient) {
    return SimpleFunction(shape.is_ball() ? SimpleSpace::Balls : SimpleSpace::Rectangles, {{coefficient, shape}});
}

double SimpleFunction::operator()(std::span<const double> p) const {
    double v = 0.0;
    for (const auto& t : terms_)
        if (t.shape.contains(p)) v += t.coefficient;
    return v;
}

SimpleFunction SimpleFunction::combine(double a, const SimpleFunction& other, double b) const {
    if (!terms_.empty() && !other.terms_.empty() && space_ != other.space_)
        throw std::invalid_argument("simple function: cannot combine X_B and X_Q functions");
    std::vector<Term> out;
    for (const auto& t : terms_) out.push_back({a * t.coefficient, t.shape});
    for (const auto& t : other.terms_) out.push_back({b * t.coefficient, t.shape});
    return SimpleFunction(terms_.empty() ? other.space_ : space_, std::move(out));
}

std::string SimpleFunction::describe() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < terms_.size(); ++i)
        os << (i ? " + " : "") << terms_[i].coefficient << "*" << terms_[i].shape.describe();
    return os.str();
}

}  // namespace siolab
