#include <algorithm>
#include <array>
#include <map>
#include <unordered_map>

#include "glow/sparql.hpp"

namespace glow::sparql {

namespace {

// Slot in the binding vector, or a constant.
struct Slot {
    int var = -1;
    const kg::Term* constant = nullptr;
};

struct CompiledPattern {
    Slot s, p, o;
};

class Executor {
public:
    Executor(const SparqlQuery& q, const kg::TripleStore& store) : q_(q), store_(store) {
        for (const auto& v : q.values) var_id(v.variable);
        for (const auto& p : q.patterns) {
            patterns_.push_back({slot(p.subject), slot(p.predicate), slot(p.object)});
        }
        for (const auto& p : q.projections) projected_.push_back(var_id(p.variable));
        plan();
    }

    ResultSet run() {
        bindings_.assign(names_.size(), nullptr);
        if (!empty_values_) step(0);
        ResultSet rs;
        for (const auto& p : q_.projections) rs.columns.push_back(p.column());
        for (auto& [_, row] : rows_) {
            if (q_.limit && rs.rows.size() >= *q_.limit) break;
            rs.rows.push_back(std::move(row));
        }
        return rs;
    }

private:
    int var_id(const std::string& name) {
        auto [it, inserted] = ids_.try_emplace(name, static_cast<int>(names_.size()));
        if (inserted) names_.push_back(name);
        return it->second;
    }

    Slot slot(const PatternTerm& t) {
        if (const auto* v = std::get_if<Variable>(&t)) return {var_id(v->name), nullptr};
        return {-1, &std::get<kg::Term>(t)};
    }

    // VALUES clauses first, then patterns greedily by number of bound positions.
    void plan() {
        std::vector<bool> bound(names_.size(), false);
        for (std::size_t i = 0; i < q_.values.size(); ++i) {
            if (q_.values[i].values.empty()) empty_values_ = true;
            order_.push_back({true, i});
            bound[ids_.at(q_.values[i].variable)] = true;
        }
        std::vector<bool> used(patterns_.size(), false);
        auto score = [&](const CompiledPattern& cp) {
            int n = 0;
            for (const auto* sl : {&cp.s, &cp.p, &cp.o}) n += (sl->var < 0 || bound[sl->var]) ? 1 : 0;
            // Subject and object lookups are more selective than predicate scans.
            if (cp.s.var < 0 || bound[cp.s.var]) n += 2;
            if (cp.o.var < 0 || bound[cp.o.var]) n += 1;
            return n;
        };
        for (std::size_t round = 0; round < patterns_.size(); ++round) {
            std::size_t best = patterns_.size();
            int best_score = -1;
            for (std::size_t i = 0; i < patterns_.size(); ++i) {
                if (used[i]) continue;
                int sc = score(patterns_[i]);
                if (sc > best_score) {
                    best = i;
                    best_score = sc;
                }
            }
            used[best] = true;
            order_.push_back({false, best});
            for (const auto* sl : {&patterns_[best].s, &patterns_[best].p, &patterns_[best].o}) {
                if (sl->var >= 0) bound[sl->var] = true;
            }
        }
    }

    const kg::Term* value_of(const Slot& sl) const { return sl.var < 0 ? sl.constant : bindings_[sl.var]; }

    void step(std::size_t depth) {
        if (depth == order_.size()) {
            emit();
            return;
        }
        auto [is_values, idx] = order_[depth];
        if (is_values) {
            const auto& clause = q_.values[idx];
            int var = ids_.at(clause.variable);
            const kg::Term* prior = bindings_[var];
            for (const auto& t : clause.values) {
                if (prior && *prior != t) continue;
                bindings_[var] = &t;
                step(depth + 1);
            }
            bindings_[var] = prior;
            return;
        }
        match(patterns_[idx], depth);
    }

    void match(const CompiledPattern& cp, std::size_t depth) {
        const kg::Term* s = value_of(cp.s);
        const kg::Term* p = value_of(cp.p);
        const kg::Term* o = value_of(cp.o);
        if ((s && !s->is_iri()) || (p && !p->is_iri())) return;

        auto try_triple = [&](const kg::Triple& t) {
            if ((s && *s != t.subject) || (p && *p != t.predicate) || (o && *o != t.object)) return;
            // Repeated variables inside one pattern must agree.
            std::array<std::pair<int, const kg::Term*>, 3> fresh{};
            std::size_t n = 0;
            auto bind = [&](const Slot& sl, const kg::Term& term) {
                if (sl.var < 0 || bindings_[sl.var]) return true;
                for (std::size_t k = 0; k < n; ++k) {
                    if (fresh[k].first == sl.var) return *fresh[k].second == term;
                }
                fresh[n++] = {sl.var, &term};
                return true;
            };
            if (!bind(cp.s, t.subject) || !bind(cp.p, t.predicate) || !bind(cp.o, t.object)) return;
            for (std::size_t k = 0; k < n; ++k) bindings_[fresh[k].first] = fresh[k].second;
            step(depth + 1);
            for (std::size_t k = 0; k < n; ++k) bindings_[fresh[k].first] = nullptr;
        };

        const auto all = store_.triples();
        if (s) {
            for (auto i : store_.with_subject(s->value)) try_triple(all[i]);
        } else if (o) {
            for (auto i : store_.with_object(*o)) try_triple(all[i]);
        } else if (p) {
            for (auto i : store_.with_predicate(p->value)) try_triple(all[i]);
        } else {
            for (const auto& t : all) try_triple(t);
        }
    }

    void emit() {
        std::vector<std::string> key;
        std::vector<kg::Term> row;
        key.reserve(projected_.size());
        row.reserve(projected_.size());
        for (int v : projected_) {
            const kg::Term* t = bindings_[v];
            row.push_back(t ? *t : kg::Term::literal(""));
            key.push_back(kg::to_ntriples(row.back()));
        }
        rows_.try_emplace(std::move(key), std::move(row));
    }

    const SparqlQuery& q_;
    const kg::TripleStore& store_;
    std::unordered_map<std::string, int> ids_;
    std::vector<std::string> names_;
    std::vector<CompiledPattern> patterns_;
    std::vector<int> projected_;
    std::vector<std::pair<bool, std::size_t>> order_;
    std::vector<const kg::Term*> bindings_;
    std::map<std::vector<std::string>, std::vector<kg::Term>> rows_;
    bool empty_values_ = false;
};

}  // namespace

ResultSet execute(const SparqlQuery& query, const kg::TripleStore& store) {
    return Executor(query, store).run();
}

}  // namespace glow::sparql
