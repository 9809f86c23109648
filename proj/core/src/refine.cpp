#include "svx/refine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "svx/errors.hpp"

namespace svx {

void RefineParams::validate() const {
    similarity.validate();
    if (n_c < 1) throw ParamError("n_c must be >= 1");
    if (!(fit_threshold > 0.0 && fit_threshold <= 1.0)) throw ParamError("fit_threshold must be in (0, 1]");
    if (max_passes && *max_passes == 0) throw ParamError("max_passes must be >= 1");
}

RegionState fit_pseudolabel(const LabelMap& sp, const LabelMap& seed, double threshold, const FeatureTable& table,
                            const Rag& rag) {
    if (sp.dims() != seed.dims()) throw ParamError("seed mask dims do not match the supervoxel map");
    if (seed.foreground() == 0) throw EmptySeedError("seed mask has no foreground voxels");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ParamError("fit_threshold must be in (0, 1]");

    const std::uint32_t k = static_cast<std::uint32_t>(table.size());
    std::vector<std::uint64_t> inside(k, 0), total(k, 0);
    const auto labels = sp.labels();
    const auto mask = seed.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++total[labels[i]];
        if (mask[i] != 0) ++inside[labels[i]];
    }

    RegionState state{RegionAggregate(table), {}, {}};
    for (std::uint32_t s = 0; s < k; ++s) {
        if (total[s] > 0 && static_cast<double>(inside[s]) > threshold * static_cast<double>(total[s])) {
            state.region.absorb(table, s);
        }
    }
    if (state.region.empty()) throw NoSeedOverlapError("no supervoxel overlaps the seed by more than the fit threshold");
    state.neighbours = find_neighbours(rag, state.region.members());
    return state;
}

GrowthTrace grow_region(RegionState& state, const SimilarityModel& model, const Rag& rag, const RefineParams& params) {
    params.validate();
    const std::size_t max_passes = params.max_passes.value_or(rag.size());
    const double sim0 = model.params().sim0;
    GrowthTrace trace;

    while (trace.passes < max_passes) {
        ++trace.passes;
        state.neighbours = find_neighbours(rag, state.region.members());
        const auto& candidates = state.neighbours;
        if (candidates.empty()) break;

        const auto region_features = model.normalized(state.region);
        std::vector<double> sims(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            sims[i] = model.region(state.region, region_features, candidates[i]);
        }
        std::vector<bool> alive(candidates.size(), true);

        bool merged = false;
        std::size_t evaluations = 0;
        while (!merged && evaluations < static_cast<std::size_t>(params.n_c)) {
            // Best remaining candidate; candidates are sorted, so the first
            // maximum has the lowest id.
            std::size_t best = candidates.size();
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (alive[i] && (best == candidates.size() || sims[i] > sims[best])) best = i;
            }
            if (best == candidates.size()) break;
            ++evaluations;
            const std::uint32_t candidate = candidates[best];

            // The candidate's own preferred neighbour.
            std::uint32_t choice = candidate;
            double choice_sim = -1.0;
            for (const auto& e : rag.neighbours(candidate)) {
                const double s = model.pair(candidate, e.neighbour);
                if (s > choice_sim) {
                    choice_sim = s;
                    choice = e.neighbour;
                }
            }

            if (state.region.contains(choice) && sims[best] > sim0) {
                state.region.absorb(model.table(), candidate);
                state.log.push_back({candidate, sims[best], model.table().voxel_count(candidate)});
                merged = true;
            }
            alive[best] = false;
        }
        trace.max_evaluations_in_pass = std::max(trace.max_evaluations_in_pass, evaluations);
        if (!merged) break;
    }
    state.neighbours = find_neighbours(rag, state.region.members());
    return trace;
}

LabelMap members_to_mask(const LabelMap& sp, const std::vector<std::uint32_t>& members) {
    std::vector<bool> flags(sp.label_count(), false);
    for (auto m : members) {
        if (m >= flags.size()) throw ParamError("member id out of range");
        flags[m] = true;
    }
    LabelMap mask(sp.dims(), sp.spacing());
    const auto labels = sp.labels();
    auto out = mask.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = flags[labels[i]] ? 1u : 0u;
    return mask;
}

RefineResult refine_on_supervoxels(const Volume& v, const LabelMap& sp, const LabelMap& seed, const RefineParams& params) {
    params.validate();
    if (seed.dims() != v.dims() || sp.dims() != v.dims()) throw ParamError("volume, supervoxel map and seed dims differ");
    if (seed.foreground() == 0) throw EmptySeedError("seed mask has no foreground voxels");

    const auto& channels = params.feature_channels.empty() ? params.slic.channels : params.feature_channels;
    const FeatureTable table = extract_features(v, sp, channels);
    const Rag rag = build_rag(sp);
    const SimilarityModel model(table, rag, params.similarity);

    RefineResult result;
    result.supervoxels = table.size();
    result.tau = model.tau();

    RegionState state;
    try {
        state = fit_pseudolabel(sp, seed, params.fit_threshold, table, rag);
    } catch (const NoSeedOverlapError& e) {
        result.mask = seed;
        result.status = RefineStatus::SeedPassthrough;
        result.warning = e.what();
        return result;
    }
    result.seed_members = state.region.members();
    result.trace = grow_region(state, model, rag, params);
    result.members = state.region.members();
    result.log = std::move(state.log);
    result.mask = members_to_mask(sp, result.members);
    result.mask.set_spacing(seed.spacing());
    return result;
}

RefineResult refine_region(const Volume& v, const LabelMap& seed, const RefineParams& params) {
    params.validate();
    if (seed.dims() != v.dims()) throw ParamError("seed dims do not match the volume");
    if (seed.foreground() == 0) throw EmptySeedError("seed mask has no foreground voxels");
    const LabelMap sp = slic(v, params.slic);
    return refine_on_supervoxels(v, sp, seed, params);
}

ModalityRoles ModalityRoles::parse(const std::string& text) {
    ModalityRoles roles;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("role entry '" + item + "' is not NAME=INDEX");
        const std::string name = item.substr(0, eq);
        int index = -1;
        try {
            std::size_t used = 0;
            index = std::stoi(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("role entry '" + item + "' has a non-integer channel index");
        }
        if (!seen.insert(name).second) throw ConfigError("role " + name + " declared twice");
        if (name == "T1") {
            roles.t1 = index;
        } else if (name == "T1Gd") {
            roles.t1gd = index;
        } else if (name == "T2") {
            roles.t2 = index;
        } else if (name == "FLAIR") {
            roles.flair = index;
        } else {
            throw ConfigError("unknown modality role '" + name + "'");
        }
    }
    return roles;
}

void ModalityRoles::validate(int channels) const {
    const std::pair<const char*, int> entries[] = {{"T1", t1}, {"T1Gd", t1gd}, {"T2", t2}, {"FLAIR", flair}};
    std::set<int> used;
    for (const auto& [name, index] : entries) {
        if (index < 0) throw ConfigError(std::string("modality role ") + name + " is not declared");
        if (index >= channels) throw ConfigError(std::string("modality role ") + name + " points past the last channel");
        if (!used.insert(index).second) throw ConfigError("two modality roles share channel " + std::to_string(index));
    }
}

CaseResult refine_case(const Volume& v, const ModalityRoles& roles, const LabelMap& seed_wt, const LabelMap& seed_tc,
                       const RefineParams& params) {
    roles.validate(v.channels());
    const std::vector<int> features = {roles.t1gd, roles.t2, roles.flair};

    RefineParams wt = params;
    wt.slic.channels = {roles.flair};
    wt.feature_channels = features;
    RefineParams tc = params;
    tc.slic.channels = {roles.t1gd, roles.t2};
    tc.feature_channels = features;

    CaseResult out{refine_region(v, seed_wt, wt), refine_region(v, seed_tc, tc)};
    auto core = out.tc.mask.labels();
    const auto whole = out.wt.mask.labels();
    for (std::size_t i = 0; i < core.size(); ++i) {
        if (whole[i] == 0) core[i] = 0;
    }
    return out;
}

}  // namespace svx
