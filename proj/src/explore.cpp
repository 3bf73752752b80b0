#include "ghostwit/explore.hpp"

#include <future>
#include <unordered_map>

namespace ghostwit {

std::string verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Safe: return "Safe";
    case VerdictKind::Unsafe: return "Unsafe";
    case VerdictKind::EvalError: return "EvalError";
    case VerdictKind::BoundExceeded: return "BoundExceeded";
  }
  return "?";
}

namespace {

struct Rec {
  State st;
  int parent = -1;  // arena index
  Step in;          // step that produced this state
};

Interleaving path_to(const std::vector<Rec>& arena, int i) {
  Interleaving out;
  for (int n = i; n > 0; n = arena[n].parent) out.steps.push_back(arena[n].in);
  std::reverse(out.steps.begin(), out.steps.end());
  return out;
}

}  // namespace

Verdict explore(const Program& p, const Bounds& b, const ExploreOptions& opt) {
  ProgramIndex idx(p);
  auto relevant = opt.relevant ? opt.relevant
                               : [](const std::string&, AssertKind) { return true; };

  std::vector<Rec> arena;
  std::unordered_map<std::string, int> visited;

  {
    State s0 = initial_state(p);
    visited.emplace(canonical_state(s0), 0);
    arena.push_back(Rec{std::move(s0), -1, {}});
  }
  std::vector<int> layer{0};

  Verdict v;
  bool have_first = false;  // collect mode: first violation seen

  auto finish = [&](VerdictKind kind) {
    v.kind = kind;
    v.stats.states = arena.size();
    return v;
  };

  for (std::uint64_t depth = 0;; ++depth) {
    if (layer.empty()) {
      // Exhausted. In collect mode a recorded violation wins.
      return finish(have_first ? VerdictKind::Unsafe : VerdictKind::Safe);
    }
    if (depth >= b.max_steps) return finish(VerdictKind::BoundExceeded);

    // Expand the whole layer first (pure per-state work, parallelizable),
    // then merge in discovery order so verdicts don't depend on job count.
    std::vector<SuccessorSet> results(layer.size());
    int jobs = b.jobs;
    if (jobs > 1 && layer.size() > 1) {
      size_t n = layer.size();
      size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
      std::vector<std::future<void>> fs;
      fs.reserve(workers);
      for (size_t w = 0; w < workers; ++w) {
        fs.push_back(std::async(std::launch::async, [&, w] {
          for (size_t i = w; i < layer.size(); i += workers)
            results[i] = successors(idx, arena[layer[i]].st);
        }));
      }
      for (auto& f : fs) f.get();
    } else {
      for (size_t i = 0; i < layer.size(); ++i)
        results[i] = successors(idx, arena[layer[i]].st);
    }

    std::vector<int> next;
    for (size_t i = 0; i < layer.size(); ++i) {
      const SuccessorSet& ss = results[i];
      if (ss.ok.empty() && ss.errors.empty()) {
        const State& st = arena[layer[i]].st;
        for (const auto& [t, entry] : st.threads) {
          if (!idx.out_edges(entry.node).empty()) {
            v.stats.deadlocked += 1;
            break;
          }
        }
      }
      for (const Successor& succ : ss.ok) {
        v.stats.transitions += 1;
        for (const auto& [id, kind] : succ.effect.violated) {
          if (!relevant(id, kind)) continue;
          if (!have_first) {
            have_first = true;
            Counterexample cex;
            cex.interleaving = path_to(arena, layer[i]);
            cex.interleaving.steps.push_back(succ.step);
            cex.assert_id = id;
            v.cex = std::move(cex);
          }
          if (opt.collect_all) {
            v.all_violations.insert(id);
          } else {
            return finish(VerdictKind::Unsafe);
          }
        }
        std::string key = canonical_state(succ.effect.state);
        auto [it, fresh] = visited.emplace(std::move(key), static_cast<int>(arena.size()));
        if (fresh) {
          if (arena.size() >= b.max_states) return finish(VerdictKind::BoundExceeded);
          next.push_back(static_cast<int>(arena.size()));
          arena.push_back(Rec{succ.effect.state, layer[i], succ.step});
        }
      }
      for (const auto& [step, msg] : ss.errors) {
        // Evaluation faults abort the whole search; they would make any
        // collected violation set unreliable.
        Counterexample cex;
        cex.interleaving = path_to(arena, layer[i]);
        cex.interleaving.steps.push_back(step);
        cex.message = msg;
        v.cex = std::move(cex);
        return finish(VerdictKind::EvalError);
      }
    }
    v.stats.depth = depth + 1;
    layer = std::move(next);
  }
}

}  // namespace ghostwit
