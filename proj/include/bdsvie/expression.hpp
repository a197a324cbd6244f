#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdsvie {

/// Which coefficient the expression defines; controls the legal variables.
/// f, g may use t, s, y1..yk, z11..zkd; xi may use wT (d = 1) or wT1..wTd.
enum class ExprSlot { F, G, Xi };

struct ExprDims {
    int k{1};
    int d{1};
    int l{1};
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t position)
        : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    std::size_t position{0};
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Arithmetic expression over the coefficient grammar:
/// literals, slot variables, + - * /, unary minus, sin cos exp sqrt abs,
/// min(a,b), max(a,b), parentheses. Precedence: unary > * / > + -,
/// left-associative. Parsed once into a small postfix program; evaluation
/// is reentrant and allocation-free.
class ExpressionAst {
public:
    struct Node;  // parse-tree node; owned via shared_ptr, immutable after parse

    static ExpressionAst parse(const std::string& text, ExprSlot slot, ExprDims dims);

    /// Evaluates at a point. y has k entries, z has k*d entries (row-major),
    /// wT has d entries. Unused slots may be empty. Throws EvalError on
    /// division by zero or a non-finite result.
    double evaluate(double t, double s, std::span<const double> y, std::span<const double> z,
                    std::span<const double> wT) const;

    /// Fully parenthesised form; re-parses to a structurally equal tree.
    std::string pretty() const;

    bool structurally_equal(const ExpressionAst& other) const;

    bool uses_y() const { return uses_y_; }
    bool uses_z() const { return uses_z_; }

    ExprSlot slot() const { return slot_; }
    ExprDims dims() const { return dims_; }

private:
    std::shared_ptr<const Node> root_;
    ExprSlot slot_{ExprSlot::F};
    ExprDims dims_{};
    bool uses_y_{false};
    bool uses_z_{false};

    enum class Op : std::uint8_t {
        PushConst, PushT, PushS, PushY, PushZ, PushWT,
        Add, Sub, Mul, Div, Neg,
        Sin, Cos, Exp, Sqrt, Abs, Min, Max
    };
    struct Instr {
        Op op;
        double value{0.0};
        int index{0};
    };
    std::vector<Instr> program_;

    void compile();
};

}  // namespace bdsvie
