#include "bdsvie/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace bdsvie {

namespace {

enum class NodeKind : std::uint8_t { Const, Var, Unary, Binary, Call1, Call2 };

enum class VarKind : std::uint8_t { T, S, Y, Z, WT };

enum class Fn : std::uint8_t { Sin, Cos, Exp, Sqrt, Abs, Min, Max };

const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
        case Fn::Min: return "min";
        case Fn::Max: return "max";
    }
    return "?";
}

}  // namespace

struct ExpressionAst::Node {
    NodeKind kind{NodeKind::Const};
    double value{0.0};
    VarKind var{VarKind::T};
    int var_index{0};  // y: component a; z: a*d+b; wT: coordinate
    char op{'+'};
    Fn fn{Fn::Sin};
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExpressionAst::Node>;

struct Token {
    enum Kind { Number, Ident, Op, LParen, RParen, Comma, End } kind{End};
    double number{0.0};
    std::string ident;
    char op{0};
    std::size_t pos{0};
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        current_ = Token{};
        current_.pos = pos_;
        if (pos_ >= text_.size()) {
            current_.kind = Token::End;
            return;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            current_.number = std::strtod(begin, &end);
            if (end == begin) throw ParseError("malformed number", pos_);
            current_.kind = Token::Number;
            pos_ += static_cast<std::size_t>(end - begin);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            current_.kind = Token::Ident;
            current_.ident = text_.substr(start, pos_ - start);
            return;
        }
        switch (c) {
            case '+': case '-': case '*': case '/':
                current_.kind = Token::Op;
                current_.op = c;
                ++pos_;
                return;
            case '(': current_.kind = Token::LParen; ++pos_; return;
            case ')': current_.kind = Token::RParen; ++pos_; return;
            case ',': current_.kind = Token::Comma; ++pos_; return;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        }
    }

    const std::string& text_;
    std::size_t pos_{0};
    Token current_;
};

struct VarRef {
    VarKind kind;
    int index;
};

// Resolves an identifier against the slot's variable set; throws on unknown
// identifiers and on slot violations ("wT" outside xi, y/z inside xi).
VarRef resolve_variable(const std::string& name, ExprSlot slot, const ExprDims& dims,
                        std::size_t pos) {
    auto component_suffix = [&](std::size_t offset) -> long {
        char* end = nullptr;
        const long v = std::strtol(name.c_str() + offset, &end, 10);
        if (end != name.c_str() + name.size()) return -1;
        return v;
    };

    if (name == "t" || name == "s") {
        if (slot == ExprSlot::Xi)
            throw ParseError("variable '" + name + "' is not legal in the xi slot", pos);
        return {name == "t" ? VarKind::T : VarKind::S, 0};
    }
    if (name.size() >= 2 && name[0] == 'y' && std::isdigit(static_cast<unsigned char>(name[1]))) {
        if (slot == ExprSlot::Xi)
            throw ParseError("variable '" + name + "' is not legal in the xi slot", pos);
        const long a = component_suffix(1);
        if (a < 1 || a > dims.k)
            throw ParseError("variable '" + name + "' exceeds k=" + std::to_string(dims.k), pos);
        return {VarKind::Y, static_cast<int>(a - 1)};
    }
    if (name.size() >= 3 && name[0] == 'z' && std::isdigit(static_cast<unsigned char>(name[1]))) {
        if (slot == ExprSlot::Xi)
            throw ParseError("variable '" + name + "' is not legal in the xi slot", pos);
        // zab with single-digit row a and column b
        if (name.size() != 3 || !std::isdigit(static_cast<unsigned char>(name[2])))
            throw ParseError("z variables use the form z<row><col>, e.g. z11", pos);
        const int a = name[1] - '0';
        const int b = name[2] - '0';
        if (a < 1 || a > dims.k || b < 1 || b > dims.d)
            throw ParseError("variable '" + name + "' exceeds the k x d block", pos);
        return {VarKind::Z, (a - 1) * dims.d + (b - 1)};
    }
    if (name == "wT") {
        if (slot != ExprSlot::Xi)
            throw ParseError("variable 'wT' is only legal in the xi slot", pos);
        if (dims.d != 1)
            throw ParseError("'wT' requires d=1; use wT1..wT" + std::to_string(dims.d), pos);
        return {VarKind::WT, 0};
    }
    if (name.size() > 2 && name.rfind("wT", 0) == 0) {
        if (slot != ExprSlot::Xi)
            throw ParseError("variable '" + name + "' is only legal in the xi slot", pos);
        const long c = component_suffix(2);
        if (c < 1 || c > dims.d)
            throw ParseError("variable '" + name + "' exceeds d=" + std::to_string(dims.d), pos);
        return {VarKind::WT, static_cast<int>(c - 1)};
    }
    throw ParseError("unknown identifier '" + name + "'", pos);
}

class Parser {
public:
    Parser(const std::string& text, ExprSlot slot, ExprDims dims)
        : lexer_(text), slot_(slot), dims_(dims) {}

    NodePtr parse() {
        NodePtr root = expression();
        if (lexer_.peek().kind != Token::End)
            throw ParseError("unexpected trailing input", lexer_.peek().pos);
        return root;
    }

private:
    using Node = ExpressionAst::Node;

    NodePtr expression() {
        NodePtr lhs = term();
        while (lexer_.peek().kind == Token::Op &&
               (lexer_.peek().op == '+' || lexer_.peek().op == '-')) {
            const char op = lexer_.take().op;
            lhs = make_binary(op, lhs, term());
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (lexer_.peek().kind == Token::Op &&
               (lexer_.peek().op == '*' || lexer_.peek().op == '/')) {
            const char op = lexer_.take().op;
            lhs = make_binary(op, lhs, factor());
        }
        return lhs;
    }

    NodePtr factor() {
        if (lexer_.peek().kind == Token::Op && lexer_.peek().op == '-') {
            lexer_.take();
            auto node = std::make_shared<Node>();
            node->kind = NodeKind::Unary;
            node->lhs = factor();
            return node;
        }
        if (lexer_.peek().kind == Token::Op && lexer_.peek().op == '+') {
            lexer_.take();
            return factor();
        }
        return primary();
    }

    NodePtr primary() {
        Token t = lexer_.take();
        switch (t.kind) {
            case Token::Number: {
                auto node = std::make_shared<Node>();
                node->kind = NodeKind::Const;
                node->value = t.number;
                return node;
            }
            case Token::Ident: {
                if (lexer_.peek().kind == Token::LParen) return call(t);
                const VarRef ref = resolve_variable(t.ident, slot_, dims_, t.pos);
                auto node = std::make_shared<Node>();
                node->kind = NodeKind::Var;
                node->var = ref.kind;
                node->var_index = ref.index;
                return node;
            }
            case Token::LParen: {
                NodePtr inner = expression();
                expect_rparen();
                return inner;
            }
            default:
                throw ParseError("expected a value", t.pos);
        }
    }

    NodePtr call(const Token& ident) {
        static const std::pair<const char*, Fn> unary[] = {
            {"sin", Fn::Sin}, {"cos", Fn::Cos}, {"exp", Fn::Exp},
            {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs}};
        lexer_.take();  // '('
        for (const auto& [name, fn] : unary) {
            if (ident.ident == name) {
                auto node = std::make_shared<Node>();
                node->kind = NodeKind::Call1;
                node->fn = fn;
                node->lhs = expression();
                expect_rparen();
                return node;
            }
        }
        if (ident.ident == "min" || ident.ident == "max") {
            auto node = std::make_shared<Node>();
            node->kind = NodeKind::Call2;
            node->fn = ident.ident == "min" ? Fn::Min : Fn::Max;
            node->lhs = expression();
            if (lexer_.peek().kind != Token::Comma)
                throw ParseError(ident.ident + std::string(" takes two arguments"),
                                 lexer_.peek().pos);
            lexer_.take();
            node->rhs = expression();
            expect_rparen();
            return node;
        }
        throw ParseError("unknown function '" + ident.ident + "'", ident.pos);
    }

    void expect_rparen() {
        if (lexer_.peek().kind != Token::RParen)
            throw ParseError("expected ')'", lexer_.peek().pos);
        lexer_.take();
    }

    NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
        auto node = std::make_shared<Node>();
        node->kind = NodeKind::Binary;
        node->op = op;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        return node;
    }

    Lexer lexer_;
    ExprSlot slot_;
    ExprDims dims_;
};

void scan_usage(const NodePtr& node, bool& uses_y, bool& uses_z) {
    if (!node) return;
    if (node->kind == NodeKind::Var) {
        if (node->var == VarKind::Y) uses_y = true;
        if (node->var == VarKind::Z) uses_z = true;
    }
    scan_usage(node->lhs, uses_y, uses_z);
    scan_usage(node->rhs, uses_y, uses_z);
}

void pretty_node(const NodePtr& node, std::ostringstream& out, const ExprDims& dims) {
    switch (node->kind) {
        case NodeKind::Const: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", node->value);
            out << buf;
            return;
        }
        case NodeKind::Var:
            switch (node->var) {
                case VarKind::T: out << "t"; return;
                case VarKind::S: out << "s"; return;
                case VarKind::Y: out << "y" << (node->var_index + 1); return;
                case VarKind::Z:
                    out << "z" << (node->var_index / dims.d + 1) << (node->var_index % dims.d + 1);
                    return;
                case VarKind::WT:
                    if (dims.d == 1)
                        out << "wT";
                    else
                        out << "wT" << (node->var_index + 1);
                    return;
            }
            return;
        case NodeKind::Unary:
            out << "(-";
            pretty_node(node->lhs, out, dims);
            out << ")";
            return;
        case NodeKind::Binary:
            out << "(";
            pretty_node(node->lhs, out, dims);
            out << node->op;
            pretty_node(node->rhs, out, dims);
            out << ")";
            return;
        case NodeKind::Call1:
            out << fn_name(node->fn) << "(";
            pretty_node(node->lhs, out, dims);
            out << ")";
            return;
        case NodeKind::Call2:
            out << fn_name(node->fn) << "(";
            pretty_node(node->lhs, out, dims);
            out << ",";
            pretty_node(node->rhs, out, dims);
            out << ")";
            return;
    }
}

bool nodes_equal(const NodePtr& a, const NodePtr& b) {
    if (!a && !b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Const: return a->value == b->value;
        case NodeKind::Var: return a->var == b->var && a->var_index == b->var_index;
        case NodeKind::Unary: return nodes_equal(a->lhs, b->lhs);
        case NodeKind::Binary: return a->op == b->op && nodes_equal(a->lhs, b->lhs) &&
                                      nodes_equal(a->rhs, b->rhs);
        case NodeKind::Call1: return a->fn == b->fn && nodes_equal(a->lhs, b->lhs);
        case NodeKind::Call2: return a->fn == b->fn && nodes_equal(a->lhs, b->lhs) &&
                                     nodes_equal(a->rhs, b->rhs);
    }
    return false;
}

}  // namespace

ExpressionAst ExpressionAst::parse(const std::string& text, ExprSlot slot, ExprDims dims) {
    if (text.empty()) throw ParseError("empty expression", 0);
    ExpressionAst ast;
    ast.slot_ = slot;
    ast.dims_ = dims;
    ast.root_ = Parser(text, slot, dims).parse();
    scan_usage(ast.root_, ast.uses_y_, ast.uses_z_);
    ast.compile();
    return ast;
}

void ExpressionAst::compile() {
    program_.clear();
    // Post-order flattening into a stack program.
    std::function<void(const std::shared_ptr<const Node>&)> emit =
        [&](const std::shared_ptr<const Node>& node) {
            switch (node->kind) {
                case NodeKind::Const:
                    program_.push_back({Op::PushConst, node->value, 0});
                    return;
                case NodeKind::Var:
                    switch (node->var) {
                        case VarKind::T: program_.push_back({Op::PushT, 0.0, 0}); return;
                        case VarKind::S: program_.push_back({Op::PushS, 0.0, 0}); return;
                        case VarKind::Y:
                            program_.push_back({Op::PushY, 0.0, node->var_index});
                            return;
                        case VarKind::Z:
                            program_.push_back({Op::PushZ, 0.0, node->var_index});
                            return;
                        case VarKind::WT:
                            program_.push_back({Op::PushWT, 0.0, node->var_index});
                            return;
                    }
                    return;
                case NodeKind::Unary:
                    emit(node->lhs);
                    program_.push_back({Op::Neg, 0.0, 0});
                    return;
                case NodeKind::Binary:
                    emit(node->lhs);
                    emit(node->rhs);
                    switch (node->op) {
                        case '+': program_.push_back({Op::Add, 0.0, 0}); return;
                        case '-': program_.push_back({Op::Sub, 0.0, 0}); return;
                        case '*': program_.push_back({Op::Mul, 0.0, 0}); return;
                        case '/': program_.push_back({Op::Div, 0.0, 0}); return;
                    }
                    return;
                case NodeKind::Call1:
                    emit(node->lhs);
                    switch (node->fn) {
                        case Fn::Sin: program_.push_back({Op::Sin, 0.0, 0}); break;
                        case Fn::Cos: program_.push_back({Op::Cos, 0.0, 0}); break;
                        case Fn::Exp: program_.push_back({Op::Exp, 0.0, 0}); break;
                        case Fn::Sqrt: program_.push_back({Op::Sqrt, 0.0, 0}); break;
                        case Fn::Abs: program_.push_back({Op::Abs, 0.0, 0}); break;
                        default: break;
                    }
                    return;
                case NodeKind::Call2:
                    emit(node->lhs);
                    emit(node->rhs);
                    program_.push_back({node->fn == Fn::Min ? Op::Min : Op::Max, 0.0, 0});
                    return;
            }
        };
    emit(root_);

    // evaluate() runs on a fixed 64-slot stack; reject deeper programs here.
    int depth = 0, max_depth = 0;
    for (const Instr& ins : program_) {
        switch (ins.op) {
            case Op::PushConst: case Op::PushT: case Op::PushS:
            case Op::PushY: case Op::PushZ: case Op::PushWT:
                max_depth = std::max(max_depth, ++depth);
                break;
            case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
            case Op::Min: case Op::Max:
                --depth;
                break;
            default:
                break;
        }
    }
    if (max_depth > 64) throw ParseError("expression is too deeply nested", 0);
}

double ExpressionAst::evaluate(double t, double s, std::span<const double> y,
                               std::span<const double> z, std::span<const double> wT) const {
    double stack[64];
    int top = -1;
    for (const Instr& ins : program_) {
        switch (ins.op) {
            case Op::PushConst: stack[++top] = ins.value; break;
            case Op::PushT: stack[++top] = t; break;
            case Op::PushS: stack[++top] = s; break;
            case Op::PushY: stack[++top] = y[static_cast<std::size_t>(ins.index)]; break;
            case Op::PushZ: stack[++top] = z[static_cast<std::size_t>(ins.index)]; break;
            case Op::PushWT: stack[++top] = wT[static_cast<std::size_t>(ins.index)]; break;
            case Op::Add: stack[top - 1] += stack[top]; --top; break;
            case Op::Sub: stack[top - 1] -= stack[top]; --top; break;
            case Op::Mul: stack[top - 1] *= stack[top]; --top; break;
            case Op::Div:
                if (stack[top] == 0.0) throw EvalError("division by zero");
                stack[top - 1] /= stack[top];
                --top;
                break;
            case Op::Neg: stack[top] = -stack[top]; break;
            case Op::Sin: stack[top] = std::sin(stack[top]); break;
            case Op::Cos: stack[top] = std::cos(stack[top]); break;
            case Op::Exp: stack[top] = std::exp(stack[top]); break;
            case Op::Sqrt: stack[top] = std::sqrt(stack[top]); break;
            case Op::Abs: stack[top] = std::abs(stack[top]); break;
            case Op::Min: stack[top - 1] = std::min(stack[top - 1], stack[top]); --top; break;
            case Op::Max: stack[top - 1] = std::max(stack[top - 1], stack[top]); --top; break;
        }
    }
    const double result = stack[0];
    if (!std::isfinite(result)) throw EvalError("expression evaluated to a non-finite value");
    return result;
}

std::string ExpressionAst::pretty() const {
    std::ostringstream out;
    pretty_node(root_, out, dims_);
    return out.str();
}

bool ExpressionAst::structurally_equal(const ExpressionAst& other) const {
    return nodes_equal(root_, other.root_);
}

}  // namespace bdsvie
