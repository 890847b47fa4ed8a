#pragma once

#include "ctabsim/builder.hpp"

namespace ctab {

/// Immutable store handed to planner/executor: base tables, encoded
/// projections, materialized views, and the logical-source name map.
struct Catalog {
    std::map<std::string, Table> baseTables;
    std::vector<ProjectionDef> projectionDefs;
    std::vector<EncodedProjection> projections;  // aligned with projectionDefs
    std::vector<MVTable> views;                  // declaration order (match priority)

    /// Extra FROM-name aliases (e.g. a projection name) -> logical source key.
    std::map<std::string, std::string> sourceAliases;

    /// Map a FROM name to its canonical logical source key.
    std::string resolveSource(const std::string& name) const {
        if (baseTables.count(name)) return name;
        for (const auto& ep : projections)
            if (ep.sourceKey == name || ep.name == name)
                return ep.sourceKey;
        auto it = sourceAliases.find(name);
        if (it != sourceAliases.end()) return it->second;
        throw SchemaError("unknown table or source: " + name);
    }

    /// Schema of a logical source: the base table's, or the raw joined form
    /// of any projection embodying it.
    std::vector<ColumnDef> sourceSchema(const std::string& sourceKey) const {
        auto bt = baseTables.find(sourceKey);
        if (bt != baseTables.end()) return bt->second.columns;
        for (const auto& ep : projections)
            if (ep.sourceKey == sourceKey) return ep.raw.columns;
        throw SchemaError("unknown source: " + sourceKey);
    }

    /// Raw row form used by the Row baseline: the base table itself, or the
    /// materialized join kept alongside a projection.
    const Table& rawTableFor(const std::string& sourceKey) const {
        auto bt = baseTables.find(sourceKey);
        if (bt != baseTables.end()) return bt->second;
        for (const auto& ep : projections)
            if (ep.sourceKey == sourceKey) return ep.raw;
        throw SchemaError("no raw table for source: " + sourceKey);
    }

    /// First projection embodying the source that covers all listed columns.
    const EncodedProjection* coveringProjection(const std::string& sourceKey,
                                                const std::vector<std::string>& columns) const {
        for (const auto& ep : projections) {
            if (ep.sourceKey != sourceKey) continue;
            bool covers = true;
            for (const auto& c : columns) covers &= (ep.findCTable(c) != nullptr);
            if (covers) return &ep;
        }
        return nullptr;
    }

    /// Join-chain definition for a logical source (for the oracle).
    const ProjectionDef* defForSource(const std::string& sourceKey) const {
        for (const auto& pd : projectionDefs)
            if (pd.sourceKey() == sourceKey) return &pd;
        return nullptr;
    }

    /// Build everything from base tables and a declarative config.
    static Catalog build(std::map<std::string, Table> base, const BuildConfig& cfg,
                         int ctableOverheadBytes = 0) {
        Catalog cat;
        cat.baseTables = std::move(base);
        cat.projectionDefs = cfg.projections;
        for (const auto& pd : cfg.projections) {
            cat.projections.push_back(buildProjection(pd, cat.baseTables, ctableOverheadBytes));
            cat.projections.back().name = pd.name;
            cat.sourceAliases[pd.name] = pd.sourceKey();
        }
        for (const auto& vd : cfg.views)
            cat.views.push_back(buildMaterializedView(vd, cfg.projections, cat.baseTables));
        return cat;
    }
};

}  // namespace ctab
