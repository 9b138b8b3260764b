#include "bdgkit/prob_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bdgkit/errors.hpp"
#include "bdgkit/rng.hpp"

namespace bdgkit {

// =============================================================================
// FilteredSpace
// =============================================================================

FilteredSpace::FilteredSpace(std::vector<double> probs, int horizon,
                             std::vector<Partition> partitions, std::vector<std::string> outcomes)
    : horizon_(horizon) {
    if (horizon < 1) {
        throw ValidationError("horizon must be >= 1");
    }
    if (partitions.size() != static_cast<std::size_t>(horizon) + 1) {
        throw StructuralError("expected horizon + 1 partitions");
    }
    if (!outcomes.empty() && outcomes.size() != probs.size()) {
        throw StructuralError("outcome labels and probabilities differ in length");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ValidationError("probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "probabilities sum to " << total << ", not 1";
        throw ValidationError(msg.str());
    }

    // Prune zero-probability atoms and remap indices.
    constexpr std::size_t kDropped = static_cast<std::size_t>(-1);
    std::vector<std::size_t> remap(probs.size(), kDropped);
    for (std::size_t a = 0; a < probs.size(); ++a) {
        if (probs[a] > 0.0) {
            remap[a] = probs_.size();
            probs_.push_back(probs[a]);
            if (!outcomes.empty()) {
                outcomes_.push_back(outcomes[a]);
            }
        }
    }
    if (outcomes_.empty()) {
        outcomes_.reserve(probs_.size());
        for (std::size_t a = 0; a < probs.size(); ++a) {
            if (remap[a] != kDropped) {
                outcomes_.push_back("w" + std::to_string(a));
            }
        }
    }

    const std::size_t n_atoms = probs_.size();
    partitions_.resize(partitions.size());
    block_index_.assign(partitions.size(), std::vector<std::size_t>(n_atoms, kDropped));
    block_probs_.resize(partitions.size());
    for (std::size_t n = 0; n < partitions.size(); ++n) {
        std::vector<char> seen(probs.size(), 0);
        for (const Block& block : partitions[n].blocks) {
            Block pruned;
            for (std::size_t a : block) {
                if (a >= probs.size()) {
                    throw StructuralError("partition refers to unknown atom " + std::to_string(a));
                }
                if (seen[a]) {
                    throw ValidationError("atom " + std::to_string(a) + " appears twice in partition " +
                                          std::to_string(n));
                }
                seen[a] = 1;
                if (remap[a] != kDropped) {
                    pruned.push_back(remap[a]);
                }
            }
            if (pruned.empty()) {
                continue;
            }
            const std::size_t id = partitions_[n].blocks.size();
            double mass = 0.0;
            for (std::size_t a : pruned) {
                block_index_[n][a] = id;
                mass += probs_[a];
            }
            block_probs_[n].push_back(mass);
            partitions_[n].blocks.push_back(std::move(pruned));
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
            throw ValidationError("partition " + std::to_string(n) + " does not cover every atom");
        }
    }

    if (partitions_[0].blocks.size() != 1) {
        throw ValidationError("partitions[0] must be the trivial partition");
    }
    for (std::size_t n = 0; n + 1 < partitions_.size(); ++n) {
        for (const Block& block : partitions_[n + 1].blocks) {
            const std::size_t parent = block_index_[n][block.front()];
            for (std::size_t a : block) {
                if (block_index_[n][a] != parent) {
                    throw ValidationError("partition " + std::to_string(n + 1) + " does not refine partition " +
                                          std::to_string(n));
                }
            }
        }
    }
}

FilteredSpace FilteredSpace::tree(int branching, int horizon, std::vector<double> atom_probs) {
    if (branching < 2) {
        throw ValidationError("branching must be >= 2");
    }
    std::size_t leaves = 1;
    for (int n = 0; n < horizon; ++n) {
        leaves *= static_cast<std::size_t>(branching);
    }
    if (atom_probs.size() != leaves) {
        throw StructuralError("tree needs branching^horizon atom probabilities");
    }
    std::vector<Partition> partitions(static_cast<std::size_t>(horizon) + 1);
    std::size_t width = leaves;
    for (int n = 0; n <= horizon; ++n) {
        auto& blocks = partitions[static_cast<std::size_t>(n)].blocks;
        blocks.resize(leaves / width);
        for (std::size_t a = 0; a < leaves; ++a) {
            blocks[a / width].push_back(a);
        }
        width /= static_cast<std::size_t>(branching);
    }
    std::vector<std::string> labels;
    labels.reserve(leaves);
    for (std::size_t a = 0; a < leaves; ++a) {
        std::string digits(static_cast<std::size_t>(horizon), '0');
        std::size_t rest = a;
        for (int k = horizon - 1; k >= 0; --k) {
            digits[static_cast<std::size_t>(k)] =
                static_cast<char>('0' + rest % static_cast<std::size_t>(branching));
            rest /= static_cast<std::size_t>(branching);
        }
        labels.push_back(std::move(digits));
    }
    return FilteredSpace(std::move(atom_probs), horizon, std::move(partitions), std::move(labels));
}

bool FilteredSpace::separates_atoms() const {
    return partitions_.back().blocks.size() == atoms();
}

// =============================================================================
// Process
// =============================================================================

Process::Process(std::size_t steps, std::size_t atoms, std::size_t dim, Measurability kind)
    : steps_(steps), atoms_(atoms), dim_(dim), kind_(kind), data_(steps * atoms * dim, 0.0) {
    if (dim == 0) {
        throw StructuralError("process dimension must be >= 1");
    }
}

Process Process::zeros_like(const Process& other, Measurability kind) {
    return Process(other.steps(), other.atoms(), other.dim(), kind);
}

Process Process::zeros_for(const FilteredSpace& space, std::size_t dim, Measurability kind) {
    return Process(space.steps(), space.atoms(), dim, kind);
}

double Process::norm_at(std::size_t n, std::size_t atom) const {
    const auto v = at(n, atom);
    if (dim_ == 1) {
        return std::abs(v[0]);
    }
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

double Process::max_abs() const {
    double m = 0.0;
    for (double x : data_) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double RandomVector::norm_at(std::size_t atom) const {
    const auto v = at(atom);
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

RandomVector slice(const Process& x, std::size_t n) {
    RandomVector out{x.dim(), std::vector<double>(x.atoms() * x.dim())};
    const auto src = x.data().subspan(n * x.atoms() * x.dim(), x.atoms() * x.dim());
    std::copy(src.begin(), src.end(), out.values.begin());
    return out;
}

void check_same_shape(const Process& a, const Process& b) {
    if (a.steps() != b.steps() || a.atoms() != b.atoms() || a.dim() != b.dim()) {
        throw StructuralError("processes differ in shape");
    }
}

void check_shape(const FilteredSpace& space, const Process& x) {
    if (x.steps() != space.steps() || x.atoms() != space.atoms()) {
        throw StructuralError("process shape does not match the filtered space");
    }
}

namespace {

Measurability combine(Measurability a, Measurability b) {
    return a == b ? a : Measurability::raw;
}

} // namespace

Process add(const Process& a, const Process& b) {
    check_same_shape(a, b);
    Process out = Process::zeros_like(a, combine(a.kind(), b.kind()));
    auto o = out.data();
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = x[i] + y[i];
    }
    return out;
}

Process subtract(const Process& a, const Process& b) {
    check_same_shape(a, b);
    Process out = Process::zeros_like(a, combine(a.kind(), b.kind()));
    auto o = out.data();
    const auto x = a.data();
    const auto y = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = x[i] - y[i];
    }
    return out;
}

Process scale(const Process& a, double factor) {
    Process out = Process::zeros_like(a, a.kind());
    auto o = out.data();
    const auto x = a.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = factor * x[i];
    }
    return out;
}

Process increments(const Process& x) {
    Process out = Process::zeros_like(x, Measurability::raw);
    const std::size_t slab = x.atoms() * x.dim();
    const auto src = x.data();
    auto dst = out.data();
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(slab), dst.begin());
    for (std::size_t i = slab; i < src.size(); ++i) {
        dst[i] = src[i] - src[i - slab];
    }
    if (x.kind() == Measurability::adapted) {
        out.set_kind(Measurability::adapted);
    }
    return out;
}

Process pointwise_norm(const Process& x) {
    Process out(x.steps(), x.atoms(), 1, x.kind());
    for (std::size_t n = 0; n < x.steps(); ++n) {
        for (std::size_t a = 0; a < x.atoms(); ++a) {
            out(n, a) = x.norm_at(n, a);
        }
    }
    return out;
}

double measurability_defect(const FilteredSpace& space, const Process& x, Measurability kind) {
    check_shape(space, x);
    if (kind == Measurability::raw) {
        return 0.0;
    }
    double defect = 0.0;
    for (std::size_t n = 0; n < x.steps(); ++n) {
        int level = static_cast<int>(n);
        if (kind == Measurability::predictable && n > 0) {
            level -= 1;
        }
        for (const Block& block : space.partition(level).blocks) {
            const auto ref = x.at(n, block.front());
            for (std::size_t a : block) {
                const auto v = x.at(n, a);
                for (std::size_t i = 0; i < x.dim(); ++i) {
                    defect = std::max(defect, std::abs(v[i] - ref[i]));
                }
            }
        }
    }
    return defect;
}

bool is_measurable(const FilteredSpace& space, const Process& x, Measurability kind, double tol) {
    return measurability_defect(space, x, kind) <= tol * std::max(1.0, x.max_abs());
}

// =============================================================================
// Conditional expectation
// =============================================================================

namespace {

// Block averages of a slab of per-atom vectors.
void condition_slab(const FilteredSpace& space, int n, std::size_t dim, std::span<const double> src,
                    std::span<double> dst) {
    const std::size_t blocks = space.block_count(n);
    std::vector<double> sums(blocks * dim, 0.0);
    for (std::size_t a = 0; a < space.atoms(); ++a) {
        const std::size_t b = space.block_of(n, a);
        const double p = space.prob(a);
        for (std::size_t i = 0; i < dim; ++i) {
            sums[b * dim + i] += p * src[a * dim + i];
        }
    }
    for (std::size_t b = 0; b < blocks; ++b) {
        const double mass = space.block_prob(n, b);
        for (std::size_t i = 0; i < dim; ++i) {
            sums[b * dim + i] /= mass;
        }
    }
    for (std::size_t a = 0; a < space.atoms(); ++a) {
        const std::size_t b = space.block_of(n, a);
        for (std::size_t i = 0; i < dim; ++i) {
            dst[a * dim + i] = sums[b * dim + i];
        }
    }
}

void check_time(const FilteredSpace& space, int n) {
    if (n < 0 || n > space.horizon()) {
        throw DomainError("time index " + std::to_string(n) + " outside 0..T");
    }
}

} // namespace

Process cond_expect(const FilteredSpace& space, const Process& x, int n) {
    check_shape(space, x);
    check_time(space, n);
    Process out = Process::zeros_like(x, Measurability::raw);
    const std::size_t slab = x.atoms() * x.dim();
    for (std::size_t t = 0; t < x.steps(); ++t) {
        condition_slab(space, n, x.dim(), x.data().subspan(t * slab, slab), out.data().subspan(t * slab, slab));
    }
    return out;
}

RandomVector cond_expect(const FilteredSpace& space, const RandomVector& x, int n) {
    if (x.values.size() != space.atoms() * x.dim) {
        throw StructuralError("random vector does not match the filtered space");
    }
    check_time(space, n);
    RandomVector out{x.dim, std::vector<double>(x.values.size())};
    condition_slab(space, n, x.dim, x.values, out.values);
    return out;
}

double expectation(const FilteredSpace& space, std::span<const double> per_atom) {
    if (per_atom.size() != space.atoms()) {
        throw StructuralError("expectation: size mismatch");
    }
    double s = 0.0;
    for (std::size_t a = 0; a < per_atom.size(); ++a) {
        s += space.prob(a) * per_atom[a];
    }
    return s;
}

std::vector<double> expectation(const FilteredSpace& space, const Process& x, std::size_t n) {
    check_shape(space, x);
    std::vector<double> mean(x.dim(), 0.0);
    for (std::size_t a = 0; a < x.atoms(); ++a) {
        const auto v = x.at(n, a);
        for (std::size_t i = 0; i < x.dim(); ++i) {
            mean[i] += space.prob(a) * v[i];
        }
    }
    return mean;
}

bool is_martingale(const FilteredSpace& space, const Process& m, double tol) {
    check_shape(space, m);
    const double threshold = tol * std::max(1.0, m.max_abs());
    if (measurability_defect(space, m, Measurability::adapted) > threshold) {
        return false;
    }
    for (std::size_t a = 0; a < m.atoms(); ++a) {
        if (m.norm_at(0, a) > threshold) {
            return false;
        }
    }
    const std::size_t dim = m.dim();
    for (int n = 1; n <= space.horizon(); ++n) {
        const std::size_t blocks = space.block_count(n - 1);
        std::vector<double> sums(blocks * dim, 0.0);
        for (std::size_t a = 0; a < m.atoms(); ++a) {
            const std::size_t b = space.block_of(n - 1, a);
            const auto now = m.at(static_cast<std::size_t>(n), a);
            const auto before = m.at(static_cast<std::size_t>(n - 1), a);
            for (std::size_t i = 0; i < dim; ++i) {
                sums[b * dim + i] += space.prob(a) * (now[i] - before[i]);
            }
        }
        for (std::size_t b = 0; b < blocks; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double mean = sums[b * dim + i] / space.block_prob(n - 1, b);
                s += mean * mean;
            }
            if (std::sqrt(s) > threshold) {
                return false;
            }
        }
    }
    return true;
}

// =============================================================================
// Generator
// =============================================================================

const char* to_string(JumpLaw law) {
    switch (law) {
    case JumpLaw::rademacher: return "rademacher";
    case JumpLaw::centered_uniform: return "centered_uniform";
    case JumpLaw::heavy_tail_truncated: return "heavy_tail_truncated";
    case JumpLaw::poisson_compensated: return "poisson_compensated";
    }
    return "unknown";
}

JumpLaw jump_law_from_string(const std::string& name) {
    for (JumpLaw law : {JumpLaw::rademacher, JumpLaw::centered_uniform, JumpLaw::heavy_tail_truncated,
                        JumpLaw::poisson_compensated}) {
        if (name == to_string(law)) {
            return law;
        }
    }
    throw ValidationError("unknown jump law '" + name + "'");
}

void validate(const MartingaleSpec& spec) {
    if (spec.branching < 2) {
        throw ValidationError("branching must be >= 2");
    }
    if (spec.horizon < 1) {
        throw ValidationError("horizon must be >= 1");
    }
    if (spec.dim < 1) {
        throw ValidationError("dim must be >= 1");
    }
    if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
        throw ValidationError("scale must be positive");
    }
}

namespace {

// Pareto tail index and truncation level of heavy_tail_truncated.
constexpr double kHeavyTailIndex = 1.5;
constexpr double kHeavyTailCap = 50.0;
constexpr double kPoissonMean = 1.0;

double draw_jump(JumpLaw law, Rng& rng) {
    switch (law) {
    case JumpLaw::rademacher: return rng.coin() ? 1.0 : -1.0;
    case JumpLaw::centered_uniform: return rng.uniform(-1.0, 1.0);
    case JumpLaw::heavy_tail_truncated: {
        const double size = std::min(std::pow(rng.uniform(), -1.0 / kHeavyTailIndex), kHeavyTailCap);
        return rng.coin() ? size : -size;
    }
    case JumpLaw::poisson_compensated: return static_cast<double>(rng.poisson(kPoissonMean)) - kPoissonMean;
    }
    return 0.0;
}

} // namespace

GeneratedMartingale generate_martingale(const MartingaleSpec& spec, std::size_t atom_cap) {
    validate(spec);
    const auto b = static_cast<std::size_t>(spec.branching);
    std::size_t leaves = 1;
    for (int n = 0; n < spec.horizon; ++n) {
        if (leaves > atom_cap / b) {
            throw CapacityError("branching^horizon exceeds the atom cap of " + std::to_string(atom_cap));
        }
        leaves *= b;
    }
    if (leaves > atom_cap) {
        throw CapacityError("branching^horizon exceeds the atom cap of " + std::to_string(atom_cap));
    }

    Rng rng(spec.seed);
    const auto horizon = static_cast<std::size_t>(spec.horizon);

    // Conditional child probabilities per (level, block, child); atom
    // probabilities are the products along each root-to-leaf path.
    std::vector<std::vector<double>> child_probs(horizon);
    std::size_t blocks = 1;
    for (std::size_t n = 0; n < horizon; ++n) {
        child_probs[n].assign(blocks * b, 1.0 / static_cast<double>(b));
        if (spec.random_child_probs) {
            for (std::size_t blk = 0; blk < blocks; ++blk) {
                double total = 0.0;
                for (std::size_t j = 0; j < b; ++j) {
                    child_probs[n][blk * b + j] = 0.25 + rng.uniform();
                    total += child_probs[n][blk * b + j];
                }
                for (std::size_t j = 0; j < b; ++j) {
                    child_probs[n][blk * b + j] /= total;
                }
            }
        }
        blocks *= b;
    }
    std::vector<double> atom_probs(leaves, 1.0);
    for (std::size_t a = 0; a < leaves; ++a) {
        std::size_t width = leaves;
        for (std::size_t n = 0; n < horizon; ++n) {
            width /= b;
            // Child block at level n + 1 is a / width.
            atom_probs[a] *= child_probs[n][a / width];
        }
    }
    double total = std::accumulate(atom_probs.begin(), atom_probs.end(), 0.0);
    for (double& p : atom_probs) {
        p /= total;
    }

    FilteredSpace space = FilteredSpace::tree(spec.branching, spec.horizon, std::move(atom_probs));
    Process m = Process::zeros_for(space, spec.dim, Measurability::adapted);

    const std::size_t dim = spec.dim;
    const bool balanced = spec.jump_law == JumpLaw::rademacher && b % 2 == 0;
    std::vector<double> inc(b * dim);
    std::vector<double> signs(b);
    blocks = 1;
    std::size_t width = leaves;
    for (std::size_t n = 0; n < horizon; ++n) {
        const std::size_t child_width = width / b;
        for (std::size_t blk = 0; blk < blocks; ++blk) {
            for (std::size_t i = 0; i < dim; ++i) {
                if (balanced) {
                    for (std::size_t j = 0; j < b; ++j) {
                        signs[j] = j < b / 2 ? 1.0 : -1.0;
                    }
                    for (std::size_t j = b - 1; j > 0; --j) {
                        std::swap(signs[j], signs[rng.below(j + 1)]);
                    }
                    for (std::size_t j = 0; j < b; ++j) {
                        inc[j * dim + i] = signs[j];
                    }
                } else {
                    for (std::size_t j = 0; j < b; ++j) {
                        inc[j * dim + i] = draw_jump(spec.jump_law, rng);
                    }
                }
                double mean = 0.0;
                for (std::size_t j = 0; j < b; ++j) {
                    mean += child_probs[n][blk * b + j] * inc[j * dim + i];
                }
                for (std::size_t j = 0; j < b; ++j) {
                    inc[j * dim + i] = spec.scale * (inc[j * dim + i] - mean);
                }
            }
            for (std::size_t j = 0; j < b; ++j) {
                const std::size_t first = (blk * b + j) * child_width;
                for (std::size_t a = first; a < first + child_width; ++a) {
                    const auto before = m.at(n, a);
                    auto after = m.at(n + 1, a);
                    for (std::size_t i = 0; i < dim; ++i) {
                        after[i] = before[i] + inc[j * dim + i];
                    }
                }
            }
        }
        blocks *= b;
        width = child_width;
    }
    return {std::move(space), std::move(m)};
}

// =============================================================================
// Stopping times
// =============================================================================

void validate_stopping_time(const FilteredSpace& space, std::span<const int> tau) {
    if (tau.size() != space.atoms()) {
        throw StructuralError("stopping time does not match the filtered space");
    }
    for (int t : tau) {
        if (t < 0 || t > space.horizon()) {
            throw ValidationError("stopping time value outside 0..T");
        }
    }
    for (int n = 0; n <= space.horizon(); ++n) {
        for (const Block& block : space.partition(n).blocks) {
            const bool stopped = tau[block.front()] <= n;
            for (std::size_t a : block) {
                if ((tau[a] <= n) != stopped) {
                    throw ValidationError("{tau <= " + std::to_string(n) + "} is not F_" + std::to_string(n) +
                                          "-measurable");
                }
            }
        }
    }
}

StoppingTime::StoppingTime(const FilteredSpace& space, std::vector<int> tau) : tau_(std::move(tau)) {
    validate_stopping_time(space, tau_);
}

StoppingTime StoppingTime::constant(const FilteredSpace& space, int n) {
    return StoppingTime(space, std::vector<int>(space.atoms(), n));
}

StoppingTime StoppingTime::hitting_time(const FilteredSpace& space, const Process& x, double level) {
    check_shape(space, x);
    std::vector<int> tau(space.atoms(), space.horizon());
    for (std::size_t a = 0; a < space.atoms(); ++a) {
        for (std::size_t n = 0; n < x.steps(); ++n) {
            if (x.norm_at(n, a) >= level) {
                tau[a] = static_cast<int>(n);
                break;
            }
        }
    }
    return StoppingTime(space, std::move(tau));
}

Process stop_process(const FilteredSpace& space, const Process& x, const StoppingTime& tau) {
    check_shape(space, x);
    validate_stopping_time(space, tau.values());
    Process out = Process::zeros_like(x, x.kind());
    for (std::size_t n = 0; n < x.steps(); ++n) {
        for (std::size_t a = 0; a < x.atoms(); ++a) {
            const auto src = x.at(std::min(n, static_cast<std::size_t>(tau[a])), a);
            auto dst = out.at(n, a);
            std::copy(src.begin(), src.end(), dst.begin());
        }
    }
    return out;
}

} // namespace bdgkit
