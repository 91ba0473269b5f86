#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spanwalk/spanprog.hpp"
#include "spanwalk/types.hpp"

namespace testutil {

using spanwalk::Bits;
using spanwalk::cd;
using spanwalk::MatrixXcd;
using spanwalk::VectorXcd;

// Residual of projecting t onto span(cols); zero iff t is in the span.
inline double spanResidual(const MatrixXcd& cols, const VectorXcd& t) {
    if (cols.cols() == 0) return t.norm();
    Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(cols);
    cod.setThreshold(1e-10);
    VectorXcd c = cod.solve(t);
    return (cols * c - t).norm();
}

// Program value from the definition: t in span of the available columns.
inline bool spanOracle(const spanwalk::SpanProgram& p, const Bits& x) {
    std::vector<int> keep;
    for (int j = 0; j < int(p.cols()); ++j) {
        bool all = true;
        for (const auto& l : p.X[j]) all = all && (bool(x[l.var]) != l.neg);
        if (all) keep.push_back(j);
    }
    MatrixXcd sub(p.rows(), Eigen::Index(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) sub.col(Eigen::Index(k)) = p.A.col(keep[k]);
    return spanResidual(sub, p.target) < 1e-8;
}

inline std::vector<Bits> allInputs(int n) {
    std::vector<Bits> out;
    for (std::uint64_t v = 0; v < (1ull << n); ++v) out.push_back(spanwalk::bitsFromIndex(v, n));
    return out;
}

// Random read-once formula over x1..xn together with an evaluator built
// independently of the parser.
struct RandomFormula {
    std::string text;
    std::function<bool(const Bits&)> eval;
};

inline RandomFormula randomFormula(std::mt19937_64& rng, int& nextVar, int depth) {
    std::uniform_int_distribution<int> pick(0, 5);
    if (depth == 0 || pick(rng) == 0) {
        int v = nextVar++;
        return {"x" + std::to_string(v + 1), [v](const Bits& x) { return x[v] != 0; }};
    }
    int kind = std::uniform_int_distribution<int>(0, 4)(rng);
    int k = kind == 3 ? 3 : kind == 4 ? 1 : std::uniform_int_distribution<int>(2, 3)(rng);
    std::vector<RandomFormula> ch;
    for (int i = 0; i < k; ++i) ch.push_back(randomFormula(rng, nextVar, depth - 1));
    static const char* names[] = {"AND", "OR", "PARITY", "MAJ", "NOT"};
    std::string s = std::string(names[kind]) + "(";
    for (int i = 0; i < k; ++i) s += (i ? ", " : "") + ch[i].text;
    s += ")";
    auto fn = [kind, ch](const Bits& x) {
        int ones = 0;
        for (const auto& c : ch) ones += c.eval(x) ? 1 : 0;
        int k = int(ch.size());
        switch (kind) {
            case 0: return ones == k;
            case 1: return ones > 0;
            case 2: return ones % 2 == 1;
            case 3: return ones >= 2;
            default: return ones == 0;
        }
    };
    return {s, fn};
}

}  // namespace testutil
