#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ordcalc/factorize.hpp"
#include "ordcalc/ideals.hpp"

using namespace ordcalc;

namespace {

constexpr int kOk = 0;        // positive verdict / successful verification
constexpr int kNegative = 1;  // negative verdict or pipeline failure, with witness
constexpr int kUsage = 2;     // usage or parse errors

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Split at top-level ';' (ignoring separators nested in (), []).
std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (ch == ';' && depth == 0) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

// Strip `name(...)` and return the argument text, if expr has that shape.
std::optional<std::string> call_of(const std::string& expr, const std::string& name) {
    if (expr.size() > name.size() + 1 && expr.compare(0, name.size() + 1, name + "(") == 0 &&
        expr.back() == ')')
        return expr.substr(name.size() + 1, expr.size() - name.size() - 2);
    return std::nullopt;
}

int run_eval(const std::string& raw) {
    std::string expr = trim(raw);
    if (auto a = call_of(expr, "norm")) {
        OperatorExpr T = parse_operator(*a);
        std::cout << format_rational(T.norm()) << "\n";
        return kOk;
    }
    if (auto a = call_of(expr, "entry")) {
        auto p = split_args(*a);
        if (p.size() != 3) throw OrdinalError("entry(OP; row; column) takes three arguments");
        OperatorExpr T = parse_operator(p[0]);
        std::cout << format_rational(T.matrix_entry(parse_ordinal(p[1]), parse_ordinal(p[2])))
                  << "\n";
        return kOk;
    }
    if (auto a = call_of(expr, "row")) {
        auto p = split_args(*a);
        if (p.size() != 2) throw OrdinalError("row(OP; point) takes two arguments");
        std::cout << parse_operator(p[0]).row(parse_ordinal(p[1])).str() << "\n";
        return kOk;
    }
    if (auto a = call_of(expr, "column")) {
        auto p = split_args(*a);
        if (p.size() != 2) throw OrdinalError("column(OP; point) takes two arguments");
        std::cout << parse_operator(p[0]).column(parse_ordinal(p[1])).str() << "\n";
        return kOk;
    }
    if (auto a = call_of(expr, "apply")) {
        auto p = split_args(*a);
        if (p.size() != 2) throw OrdinalError("apply(OP; STEP) takes two arguments");
        std::cout << parse_operator(p[0]).apply(parse_step(p[1])).str() << "\n";
        return kOk;
    }
    try {
        Ordinal a = parse_ordinal(expr);
        std::cout << a.str() << "\n";
        return kOk;
    } catch (const OrdinalError&) {
    }
    std::cout << parse_operator(expr).str() << "\n";
    return kOk;
}

int run_check(const std::string& ideal, const std::string& optext) {
    OperatorExpr T = parse_operator(optext);
    if (ideal == "M") {
        auto c = in_loy_willis(T);
        std::cout << c.str();
        return c.verdict ? kOk : kNegative;
    }
    auto r = separable_range(T);
    std::cout << r.certificate.str();
    return r.separable ? kOk : kNegative;
}

int run_validate(const std::string& optext) {
    auto rep = rudin_validate(parse_operator(optext));
    std::cout << rep.str();
    return rep.all_pass() ? kOk : kNegative;
}

int run_factorize(const OperatorExpr& T, const FactorizeOptions& opt, const std::string& out) {
    FactorizationResult res = factorize(T, opt);
    std::string text = res.certificate.text();
    std::cout << text;
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write " << out << "\n";
            return kNegative;
        }
        f << text;
    }
    return kOk;
}

int run_verify(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "cannot read " << path << "\n";
        return kUsage;
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    std::string stored = buf.str();
    std::string optext, trtext;
    std::istringstream lines(stored);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("operator: ", 0) == 0) optext = line.substr(10);
        if (line.rfind("truncation: ", 0) == 0) trtext = line.substr(12);
    }
    if (optext.empty() || trtext.empty()) {
        std::cerr << "certificate lacks operator/truncation header lines\n";
        return kUsage;
    }
    OperatorExpr T = parse_operator(optext);
    FactorizeOptions opt;
    opt.truncation = parse_ordinal(trtext);
    FactorizationResult res = factorize(T, opt);
    if (res.certificate.text() == stored) {
        std::cout << "verified: transcript reproduced byte-for-byte\n";
        return kOk;
    }
    std::cout << "verification failed: replayed transcript differs\n";
    return kNegative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordcalc: symbolic operator calculus on C([0, W])"};
    app.require_subcommand(1);

    std::string eval_expr;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate an ordinal/operator expression");
    eval_cmd->add_option("expr", eval_expr, "expression")->required();

    std::string ideal, check_op;
    auto* check_cmd = app.add_subcommand("check", "ideal membership with certificate");
    check_cmd->add_option("ideal", ideal, "M (Loy-Willis) or X (separable range)")
        ->required()
        ->check(CLI::IsMember({"M", "X"}));
    check_cmd->add_option("operator", check_op, "operator expression")->required();

    std::string fact_op, truncate_text, out_file;
    unsigned samples = 200, seed = 0;
    if (const char* env = std::getenv("ORDCALC_TRUNCATE")) truncate_text = env;
    auto* fact_cmd = app.add_subcommand("factorize", "run the factorization pipeline");
    fact_cmd->add_option("operator", fact_op, "operator expression")->required();
    fact_cmd->add_option("--truncate", truncate_text, "truncation bound (default w^(3))");
    fact_cmd->add_option("--out", out_file, "write the certificate to a file");
    fact_cmd->add_option("--samples", samples, "sample budget (reserved; default 200)");
    fact_cmd->add_option("--seed", seed, "random seed (reserved; default 0)");

    std::string verify_path;
    auto* verify_cmd = app.add_subcommand("verify", "replay a certificate file");
    verify_cmd->add_option("file", verify_path, "certificate path")->required();

    std::string validate_op;
    auto* validate_cmd = app.add_subcommand("validate", "matrix-representation clauses");
    validate_cmd->add_option("operator", validate_op, "operator expression")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kUsage;
    }

    try {
        if (*eval_cmd) return run_eval(eval_expr);
        if (*validate_cmd) return run_validate(validate_op);
        if (*check_cmd) return run_check(ideal, check_op);
        if (*fact_cmd) {
            OperatorExpr T;
            FactorizeOptions opt;
            try {
                T = parse_operator(fact_op);
                if (!truncate_text.empty()) opt.truncation = parse_ordinal(truncate_text);
            } catch (const OrdinalError& e) {
                std::cerr << "parse error: " << e.what() << "\n";
                return kUsage;
            }
            return run_factorize(T, opt, out_file);
        }
        if (*verify_cmd) return run_verify(verify_path);
    } catch (const OrdinalError& e) {
        bool parse_phase = *eval_cmd || *check_cmd || *validate_cmd;
        std::string what = e.what();
        if (parse_phase && (what.find("syntax error") != std::string::npos ||
                            what.find("takes") != std::string::npos ||
                            what.find("unrecognized") != std::string::npos ||
                            what.find("unknown") != std::string::npos)) {
            std::cerr << "parse error: " << what << "\n";
            return kUsage;
        }
        std::cerr << "error: " << what << "\n";
        return kNegative;
    }
    return kUsage;
}
