#include <ostream>
#include <cstdio>

#include "bccd/errors.hpp"
#include "bccd/simgen.hpp"

namespace bccd {

int mark_category(Mark m) {
    switch (m) {
        case Mark::None: return 0;
        case Mark::Arrow: return 1;
        case Mark::Tail: return 2;
        case Mark::Circle: return 3;
    }
    return 0;
}

ConfusionMatrix confusion_matrix(const Pag& predicted, const Pag& truth) {
    if (predicted.size() != truth.size()) throw ArgumentError("PAGs differ in variable count");
    ConfusionMatrix c{};
    for (NodeId a = 0; a < truth.size(); ++a)
        for (NodeId b = 0; b < truth.size(); ++b)
            if (a != b) ++c[mark_category(truth.mark(a, b))][mark_category(predicted.mark(a, b))];
    return c;
}

double pag_accuracy(const Pag& predicted, const Pag& truth) {
    ConfusionMatrix c = confusion_matrix(predicted, truth);
    long total = 0, diagonal = 0;
    for (int i = 0; i < kMarkCategories; ++i) {
        diagonal += c[i][i];
        for (int j = 0; j < kMarkCategories; ++j) total += c[i][j];
    }
    return total == 0 ? 1.0 : static_cast<double>(diagonal) / static_cast<double>(total);
}

namespace {

bool causes(const GroundTruth& t, NodeId a, NodeId b) {
    return a != b && contains(ancestors(t.full_dag, t.observed[b]), t.observed[a]);
}

void check_size(const GroundTruth& t, int n) {
    if (static_cast<int>(t.observed.size()) != n) throw ArgumentError("observed variable count does not match the truth");
}

}  // namespace

double causal_accuracy(const CausalMatrix& mc, const GroundTruth& truth) {
    check_size(truth, mc.size());
    int decided = 0, correct = 0;
    for (NodeId a = 0; a < mc.size(); ++a) {
        for (NodeId b = 0; b < mc.size(); ++b) {
            if (a == b || mc.at(a, b) == CausalStatus::Unknown) continue;
            ++decided;
            if ((mc.at(a, b) == CausalStatus::Causes) == causes(truth, a, b)) ++correct;
        }
    }
    return decided == 0 ? 1.0 : static_cast<double>(correct) / decided;
}

int causal_decisions(const CausalMatrix& mc) {
    int decided = 0;
    for (NodeId a = 0; a < mc.size(); ++a)
        for (NodeId b = 0; b < mc.size(); ++b)
            if (a != b && mc.at(a, b) != CausalStatus::Unknown) ++decided;
    return decided;
}

bool statement_holds(const CausalStatement& s, const GroundTruth& truth) {
    const int n = static_cast<int>(truth.observed.size());
    for (int i = 0; i < s.slot_count(); ++i)
        if (s.vars[i] < 0 || s.vars[i] >= n) throw ArgumentError("statement names an unknown variable");
    switch (s.kind) {
        case StatementKind::DisjunctiveCause:
            return causes(truth, s.vars[0], s.vars[1]) || causes(truth, s.vars[0], s.vars[2]);
        case StatementKind::NonCause: return !causes(truth, s.vars[0], s.vars[1]);
        case StatementKind::NonAdjacent: return !truth.true_mag.adjacent(s.vars[0], s.vars[1]);
        case StatementKind::Cause: return causes(truth, s.vars[0], s.vars[1]);
    }
    return false;
}

EvalReport evaluate(const Pag& predicted, const CausalMatrix& mc, const std::vector<Decision>& log,
                    const GroundTruth& truth) {
    check_size(truth, predicted.size());
    EvalReport r;
    r.confusion = confusion_matrix(predicted, truth.true_pag);
    r.pag_accuracy = pag_accuracy(predicted, truth.true_pag);
    r.causal_accuracy = causal_accuracy(mc, truth);
    r.decisions = causal_decisions(mc);
    for (const auto& d : log) {
        if (d.status != DecisionStatus::Applied) continue;
        ++r.applied_statements;
        if (statement_holds(d.statement, truth)) ++r.correct_statements;
    }
    r.skeleton_match = true;
    for (NodeId a = 0; a < predicted.size(); ++a)
        for (NodeId b = a + 1; b < predicted.size(); ++b)
            if (predicted.adjacent(a, b) != truth.true_pag.adjacent(a, b)) r.skeleton_match = false;
    return r;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    static const char* kNames[kMarkCategories] = {"absent", "arrow", "tail", "circle"};
    out << "trial,theta,pag_accuracy,causal_accuracy,decisions,applied_statements,correct_statements,skeleton_match";
    for (int i = 0; i < kMarkCategories; ++i)
        for (int j = 0; j < kMarkCategories; ++j) out << ",true_" << kNames[i] << "_pred_" << kNames[j];
    out << '\n';
    char buf[64];
    for (const auto& row : rows) {
        const EvalReport& r = row.report;
        std::snprintf(buf, sizeof buf, "%.6g,%.17g,%.17g", row.theta, r.pag_accuracy, r.causal_accuracy);
        out << row.trial << ',' << buf << ',' << r.decisions << ',' << r.applied_statements << ','
            << r.correct_statements << ',' << (r.skeleton_match ? 1 : 0);
        for (const auto& line : r.confusion)
            for (long c : line) out << ',' << c;
        out << '\n';
    }
}

}  // namespace bccd
