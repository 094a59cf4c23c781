#include "flowcast/flow.hpp"

#include "flowcast/parallel.hpp"

namespace flowcast {

Vec2 flow(const AngleField& field, const SceneDomain& scene, Vec2 x0, double duration,
          double step) {
    return rk4_integrate(
        [&](Vec2 x) { return field.eval(scene.to_canonical(x)); }, x0, duration, step);
}

std::span<const Vec2> FlowTable::row(int field_index, int m) const {
    const auto& fr = fields.at(static_cast<size_t>(field_index));
    if (m == 0) return grid_points;
    const auto& side = m > 0 ? fr.forward : fr.backward;
    return side.at(static_cast<size_t>(std::abs(m)) - 1);
}

FlowTable make_flow_table(std::span<const Vec2> grid, size_t n_fields, double increment,
                          double step) {
    if (!(increment > 0.0) || !(step > 0.0))
        throw std::invalid_argument("make_flow_table: increment and step must be > 0");
    FlowTable table;
    table.grid_points.assign(grid.begin(), grid.end());
    table.increment = increment;
    table.step = step;
    table.fields.resize(n_fields);
    return table;
}

void extend_flow_table(FlowTable& table, std::span<const AngleField> fields,
                       const SceneDomain& scene, int threads) {
    if (fields.size() != table.fields.size())
        throw std::invalid_argument("extend_flow_table: field count mismatch");
    const int l = table.extent();
    const size_t npts = table.grid_points.size();
    for (size_t k = 0; k < fields.size(); ++k) {
        auto& fr = table.fields[k];
        const std::vector<Vec2>& fwd_src = l == 0 ? table.grid_points : fr.forward.back();
        const std::vector<Vec2>& bwd_src = l == 0 ? table.grid_points : fr.backward.back();
        std::vector<Vec2> fwd(npts), bwd(npts);
        const AngleField& field = fields[k];
        parallel_for(npts, threads, [&](size_t i) {
            fwd[i] = flow(field, scene, fwd_src[i], table.increment, table.step);
            bwd[i] = flow(field, scene, bwd_src[i], -table.increment, table.step);
        });
        fr.forward.push_back(std::move(fwd));
        fr.backward.push_back(std::move(bwd));
    }
}

}  // namespace flowcast
