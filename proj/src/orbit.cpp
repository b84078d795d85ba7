#include "sl2limits/orbit.hpp"

#include <unordered_map>

namespace sl2limits {

OrbitExperimentResult orbit_experiment(const std::vector<Mat2>& generators,
                                       const std::vector<End>& seeds, int rounds,
                                       size_t cap, const MergeOracle& oracle) {
    OrbitExperimentResult res;
    std::vector<End> items;
    std::unordered_map<std::string, size_t> index;
    UnionFind uf;

    auto admit = [&](const End& e) -> size_t {
        std::string key = e.canonical_key();
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        items.push_back(e);
        index.emplace(std::move(key), items.size() - 1);
        return uf.add();
    };
    for (const auto& s : seeds) admit(s);

    std::vector<Mat2> gens;
    for (const auto& g : generators) {
        gens.push_back(g);
        gens.push_back(g.inverse());
    }

    for (int round = 0; round < rounds; ++round) {
        size_t before_items = items.size();
        size_t before_classes = uf.count_roots();
        size_t snapshot = items.size();
        for (size_t i = 0; i < snapshot; ++i) {
            for (const auto& g : gens) {
                End img;
                try {
                    img = act_end(g, items[i]);
                } catch (const PrecisionExhausted&) {
                    ++res.skipped;
                    continue;
                } catch (const DivisionByInexactZero&) {
                    ++res.skipped;
                    continue;
                }
                std::string key = img.canonical_key();
                auto it = index.find(key);
                if (it != index.end()) {
                    if (uf.unite(i, it->second)) {
                        ++res.merges;
                        res.merge_events.emplace_back(items[i].str(), items[it->second].str());
                    }
                } else if (items.size() < cap) {
                    size_t j = admit(img);
                    uf.unite(i, j);
                }
            }
        }
        if (oracle) {
            // One representative per class; merge classes joined by a
            // verified witness.
            std::vector<size_t> reps;
            for (size_t i = 0; i < items.size(); ++i)
                if (uf.find(i) == i) reps.push_back(i);
            for (size_t i = 0; i < reps.size(); ++i)
                for (size_t j = i + 1; j < reps.size(); ++j) {
                    if (uf.find(reps[i]) == uf.find(reps[j])) continue;
                    if (oracle(items[reps[i]], items[reps[j]])) {
                        uf.unite(reps[i], reps[j]);
                        ++res.merges;
                        res.merge_events.emplace_back(items[reps[i]].str(),
                                                      items[reps[j]].str());
                    }
                }
        }
        res.class_count_per_round.push_back(uf.count_roots());
        // Stable closure: nothing new collected and no class merged.
        if (items.size() == before_items && uf.count_roots() == before_classes) break;
    }
    res.class_count = uf.count_roots();
    res.total_ends = items.size();
    return res;
}

}  // namespace sl2limits
