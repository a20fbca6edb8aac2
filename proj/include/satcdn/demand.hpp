#pragma once

// Content catalog and the demand tensor demand[v][c][t], plus trace I/O,
// synthetic generators and the moving-average predictor.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "satcdn/csv.hpp"
#include "satcdn/snapshot.hpp"

namespace satcdn {

class ContentCatalog {
public:
    void add(const std::string& id, double size_mb) {
        if (!(size_mb > 0.0)) throw std::invalid_argument("content '" + id + "': size must be > 0");
        if (index_.contains(id)) throw std::invalid_argument("duplicate content id '" + id + "'");
        index_.emplace(id, ids_.size());
        ids_.push_back(id);
        sizes_.push_back(size_mb);
    }

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    const std::string& id(std::size_t c) const { return ids_[c]; }
    double size_mb(std::size_t c) const { return sizes_[c]; }
    const std::vector<std::string>& ids() const { return ids_; }

    std::optional<std::size_t> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const ContentCatalog& a, const ContentCatalog& b) {
        return a.ids_ == b.ids_ && a.sizes_ == b.sizes_;
    }

private:
    std::vector<std::string> ids_;
    std::vector<double> sizes_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Dense demand tensor. Slots are 1-based; user and content axes follow the
// order of the id lists passed at construction.
class DemandMatrix {
public:
    DemandMatrix() = default;
    DemandMatrix(std::vector<std::string> users, std::vector<std::string> contents, int slots)
        : users_(std::move(users)), contents_(std::move(contents)), slots_(slots) {
        if (slots < 0) throw std::invalid_argument("DemandMatrix: negative slot count");
        values_.assign(static_cast<std::size_t>(slots) * users_.size() * contents_.size(), 0.0);
    }

    int slots() const { return slots_; }
    std::size_t user_count() const { return users_.size(); }
    std::size_t content_count() const { return contents_.size(); }
    const std::vector<std::string>& user_ids() const { return users_; }
    const std::vector<std::string>& content_ids() const { return contents_; }

    double& at(int slot, std::size_t user, std::size_t content) { return values_[offset(slot, user, content)]; }
    double at(int slot, std::size_t user, std::size_t content) const { return values_[offset(slot, user, content)]; }

    void set(int slot, std::size_t user, std::size_t content, double v) {
        if (!(v >= 0.0)) throw std::invalid_argument("demand values must be >= 0");
        at(slot, user, content) = v;
    }

    double slot_total(int slot) const {
        double s = 0.0;
        for (std::size_t u = 0; u < users_.size(); ++u)
            for (std::size_t c = 0; c < contents_.size(); ++c) s += at(slot, u, c);
        return s;
    }

    double content_total(std::size_t content) const {
        double s = 0.0;
        for (int t = 1; t <= slots_; ++t)
            for (std::size_t u = 0; u < users_.size(); ++u) s += at(t, u, content);
        return s;
    }

    double total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

    // Demand of one content at one slot, indexed by user.
    std::vector<double> user_vector(int slot, std::size_t content) const {
        std::vector<double> out(users_.size());
        for (std::size_t u = 0; u < users_.size(); ++u) out[u] = at(slot, u, content);
        return out;
    }

    DemandMatrix scaled(double factor) const {
        DemandMatrix out = *this;
        for (double& v : out.values_) v *= factor;
        return out;
    }

    friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

private:
    std::size_t offset(int slot, std::size_t user, std::size_t content) const {
        if (slot < 1 || slot > slots_) throw std::out_of_range("demand slot " + std::to_string(slot) + " out of range");
        return (static_cast<std::size_t>(slot - 1) * users_.size() + user) * contents_.size() + content;
    }

    std::vector<std::string> users_;
    std::vector<std::string> contents_;
    int slots_ = 0;
    std::vector<double> values_;
};

struct Workload {
    ContentCatalog catalog;
    DemandMatrix demand;
};

inline ContentCatalog load_catalog(const std::string& path) {
    ContentCatalog cat;
    for (const auto& row : csv::read(path, {"content", "size_mb"})) {
        try {
            cat.add(row.fields[0], csv::to_double(row.fields[1], path, row.line));
        } catch (const std::invalid_argument& e) {
            throw csv::ParseError(path, row.line, e.what());
        }
    }
    return cat;
}

inline void save_catalog(const std::string& path, const ContentCatalog& cat) {
    csv::Writer w(path);
    w.row("content", "size_mb");
    for (std::size_t c = 0; c < cat.size(); ++c) w.row(cat.id(c), cat.size_mb(c));
}

// Ground nodes from a `name,lat_deg,lon_deg` file.
inline std::vector<GroundNode> load_ground_nodes(const std::string& path, GroundKind kind) {
    std::vector<GroundNode> out;
    for (const auto& row : csv::read(path, {"name", "lat_deg", "lon_deg"})) {
        try {
            out.emplace_back(row.fields[0], kind, csv::to_double(row.fields[1], path, row.line),
                             csv::to_double(row.fields[2], path, row.line));
        } catch (const std::invalid_argument& e) {
            throw csv::ParseError(path, row.line, e.what());
        }
    }
    return out;
}

inline void save_ground_nodes(const std::string& path, std::span<const GroundNode> nodes) {
    csv::Writer w(path);
    w.row("name", "lat_deg", "lon_deg");
    for (const auto& n : nodes) w.row(n.id, n.latitude_deg, n.longitude_deg);
}

struct TraceOptions {
    // Keep only the top_k most demanded contents; 0 keeps all.
    std::size_t top_k = 10;
    int first_slot = 1;
    std::optional<int> last_slot;
    // Sizes for the trace's contents; contents default to 1 MB when absent.
    const ContentCatalog* sizes = nullptr;
};

// Reads a `slot,user_node,content,demand` trace. The catalog keeps the
// contents' first-appearance order; duplicate rows accumulate.
inline Workload load_trace(const std::string& path, const std::vector<std::string>& users,
                           const TraceOptions& opt = {}) {
    std::unordered_map<std::string, std::size_t> user_index;
    for (std::size_t i = 0; i < users.size(); ++i) user_index.emplace(users[i], i);

    struct Entry {
        int slot;
        std::size_t user;
        std::size_t content;
        double demand;
    };
    std::vector<Entry> entries;
    std::vector<std::string> content_order;
    std::unordered_map<std::string, std::size_t> content_index;
    int max_slot = opt.first_slot - 1;

    for (const auto& row : csv::read(path, {"slot", "user_node", "content", "demand"})) {
        const long long slot = csv::to_int(row.fields[0], path, row.line);
        if (slot < 1) throw csv::ParseError(path, row.line, "slot must be >= 1");
        auto u = user_index.find(row.fields[1]);
        if (u == user_index.end()) throw csv::ParseError(path, row.line, "unknown user node '" + row.fields[1] + "'");
        const double d = csv::to_double(row.fields[3], path, row.line);
        if (!(d >= 0.0)) throw csv::ParseError(path, row.line, "demand must be >= 0");
        if (row.fields[2].empty()) throw csv::ParseError(path, row.line, "empty content id");
        if (slot < opt.first_slot || (opt.last_slot && slot > *opt.last_slot)) continue;
        auto [it, inserted] = content_index.emplace(row.fields[2], content_order.size());
        if (inserted) content_order.push_back(row.fields[2]);
        entries.push_back({static_cast<int>(slot), u->second, it->second, d});
        max_slot = std::max(max_slot, static_cast<int>(slot));
    }

    std::vector<double> totals(content_order.size(), 0.0);
    for (const auto& e : entries) totals[e.content] += e.demand;
    std::vector<std::size_t> keep(content_order.size());
    std::iota(keep.begin(), keep.end(), 0);
    if (opt.top_k > 0 && keep.size() > opt.top_k) {
        std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
            if (totals[a] != totals[b]) return totals[a] > totals[b];
            return content_order[a] < content_order[b];
        });
        keep.resize(opt.top_k);
        std::sort(keep.begin(), keep.end());
    }
    std::vector<std::ptrdiff_t> remap(content_order.size(), -1);
    Workload w;
    std::vector<std::string> kept_ids;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        remap[keep[k]] = static_cast<std::ptrdiff_t>(k);
        const std::string& id = content_order[keep[k]];
        kept_ids.push_back(id);
        double size = 1.0;
        if (opt.sizes != nullptr) {
            auto c = opt.sizes->find(id);
            if (!c) throw std::runtime_error(path + ": content '" + id + "' missing from catalog");
            size = opt.sizes->size_mb(*c);
        }
        w.catalog.add(id, size);
    }

    const int slots = opt.last_slot ? std::max(0, *opt.last_slot - opt.first_slot + 1)
                                    : std::max(0, max_slot - opt.first_slot + 1);
    w.demand = DemandMatrix(users, kept_ids, slots);
    for (const auto& e : entries) {
        if (remap[e.content] < 0) continue;
        w.demand.at(e.slot - opt.first_slot + 1, e.user, static_cast<std::size_t>(remap[e.content])) += e.demand;
    }
    return w;
}

// Writes every cell, zeros included, so that loading returns the same matrix.
inline void save_trace(const std::string& path, const DemandMatrix& d) {
    csv::Writer w(path);
    w.row("slot", "user_node", "content", "demand");
    for (int t = 1; t <= d.slots(); ++t)
        for (std::size_t u = 0; u < d.user_count(); ++u)
            for (std::size_t c = 0; c < d.content_count(); ++c)
                w.row(t, d.user_ids()[u], d.content_ids()[c], d.at(t, u, c));
}

struct BoundingBox {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;
};

// Contiguous-US box used by the grid scenarios.
inline constexpr BoundingBox kUsBoundingBox{25.0, 49.0, -124.0, -67.0};

struct GridDemandSpec {
    int rows = 5;
    int cols = 10;
    BoundingBox bbox = kUsBoundingBox;
    double per_slot_demand = 1.0;
    int slots = 48;
    // Centered sub-grid that receives demand; defaults to the whole grid.
    std::optional<int> active_rows;
    std::optional<int> active_cols;
};

struct GridDemand {
    std::vector<GroundNode> users;
    Workload workload;
};

// rows x cols user regions at cell centers (row 0 is the northern edge); each
// active cell gets `per_slot_demand` of every catalog content in every slot.
inline GridDemand synth_grid_demand(const GridDemandSpec& spec, const ContentCatalog& catalog) {
    if (spec.rows < 1 || spec.cols < 1) throw std::invalid_argument("grid needs rows, cols >= 1");
    if (spec.slots < 1) throw std::invalid_argument("grid demand needs at least one slot");
    if (!(spec.bbox.lat_max > spec.bbox.lat_min) || !(spec.bbox.lon_max > spec.bbox.lon_min) ||
        spec.bbox.lat_min < -90.0 || spec.bbox.lat_max > 90.0) {
        throw std::invalid_argument("degenerate bounding box");
    }
    if (!(spec.per_slot_demand >= 0.0)) throw std::invalid_argument("per-slot demand must be >= 0");
    if (catalog.empty()) throw std::invalid_argument("grid demand needs at least one content");
    const int ar = spec.active_rows.value_or(spec.rows);
    const int ac = spec.active_cols.value_or(spec.cols);
    if (ar < 0 || ar > spec.rows || ac < 0 || ac > spec.cols) throw std::invalid_argument("active sub-grid exceeds grid");
    const int r0 = (spec.rows - ar) / 2;
    const int c0 = (spec.cols - ac) / 2;

    const double dlat = (spec.bbox.lat_max - spec.bbox.lat_min) / spec.rows;
    const double dlon = (spec.bbox.lon_max - spec.bbox.lon_min) / spec.cols;
    GridDemand out;
    std::vector<std::string> ids;
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            std::string id = "cell_" + std::to_string(r) + "_" + std::to_string(c);
            out.users.emplace_back(id, GroundKind::user_region, spec.bbox.lat_max - (r + 0.5) * dlat,
                                   spec.bbox.lon_min + (c + 0.5) * dlon);
            ids.push_back(std::move(id));
        }
    }
    out.workload.catalog = catalog;
    out.workload.demand = DemandMatrix(ids, catalog.ids(), spec.slots);
    for (int r = r0; r < r0 + ar; ++r)
        for (int c = c0; c < c0 + ac; ++c)
            for (int t = 1; t <= spec.slots; ++t)
                for (std::size_t k = 0; k < catalog.size(); ++k)
                    out.workload.demand.at(t, static_cast<std::size_t>(r * spec.cols + c), k) = spec.per_slot_demand;
    return out;
}

// Multinomial split of `requests_per_slot` requests of every content over the
// users in proportion to `weights`, independently per slot.
inline DemandMatrix synth_population_demand(std::span<const double> weights, const std::vector<std::string>& users,
                                            const ContentCatalog& catalog, std::int64_t requests_per_slot, int slots,
                                            std::uint64_t seed) {
    if (weights.size() != users.size()) throw std::invalid_argument("one weight per user is required");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("population weights must be >= 0");
        wsum += w;
    }
    if (!(wsum > 0.0)) throw std::invalid_argument("population weights are all zero");
    if (requests_per_slot < 0) throw std::invalid_argument("request count must be >= 0");

    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0) last_positive = i;

    DemandMatrix d(users, catalog.ids(), slots);
    std::mt19937_64 rng(seed);
    for (int t = 1; t <= slots; ++t) {
        for (std::size_t c = 0; c < catalog.size(); ++c) {
            std::int64_t remaining = requests_per_slot;
            double wleft = wsum;
            for (std::size_t u = 0; u < users.size() && remaining > 0; ++u) {
                if (weights[u] <= 0.0) continue;
                std::int64_t k = remaining;
                if (u != last_positive) {
                    const double p = std::clamp(weights[u] / wleft, 0.0, 1.0);
                    std::binomial_distribution<std::int64_t> bin(remaining, p);
                    k = bin(rng);
                }
                d.at(t, u, c) = static_cast<double>(k);
                remaining -= k;
                wleft -= weights[u];
            }
        }
    }
    return d;
}

// demand'[t] = mean(demand[t-window .. t-1]) over the slots that exist;
// slot 1 has no history and predicts 0.
inline DemandMatrix predict_demand(const DemandMatrix& history, int window_slots) {
    if (window_slots < 1) throw std::invalid_argument("prediction window must be >= 1");
    DemandMatrix out(history.user_ids(), history.content_ids(), history.slots());
    for (int t = 2; t <= history.slots(); ++t) {
        const int lo = std::max(1, t - window_slots);
        const double n = t - lo;
        for (std::size_t u = 0; u < history.user_count(); ++u) {
            for (std::size_t c = 0; c < history.content_count(); ++c) {
                double s = 0.0;
                for (int h = lo; h < t; ++h) s += history.at(h, u, c);
                out.at(t, u, c) = s / n;
            }
        }
    }
    return out;
}

}  // namespace satcdn
