#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bdgkit {

// =============================================================================
// Filtered space
// =============================================================================

using Block = std::vector<std::size_t>;

struct Partition {
    std::vector<Block> blocks;
};

/// Finite probability space with a filtration given by refining partitions
/// F_0 ⊂ F_1 ⊂ ... ⊂ F_T of the atom set.
///
/// Zero-probability atoms are removed at construction and the partitions are
/// remapped accordingly, so every atom and every block has positive mass.
class FilteredSpace {
public:
    FilteredSpace(std::vector<double> probs, int horizon, std::vector<Partition> partitions,
                  std::vector<std::string> outcomes = {});

    /// Tree filtration: atom ω ∈ [0, b^T) is the leaf reached by the base-b
    /// digits of ω; the block of ω at time n is ω / b^(T-n).
    static FilteredSpace tree(int branching, int horizon, std::vector<double> atom_probs);

    std::size_t atoms() const { return probs_.size(); }
    int horizon() const { return horizon_; }
    std::size_t steps() const { return static_cast<std::size_t>(horizon_) + 1; }

    double prob(std::size_t atom) const { return probs_[atom]; }
    std::span<const double> probs() const { return probs_; }
    const std::vector<std::string>& outcomes() const { return outcomes_; }

    const Partition& partition(int n) const { return partitions_[static_cast<std::size_t>(n)]; }
    std::size_t block_count(int n) const { return partition(n).blocks.size(); }
    std::size_t block_of(int n, std::size_t atom) const {
        return block_index_[static_cast<std::size_t>(n)][atom];
    }
    double block_prob(int n, std::size_t block) const {
        return block_probs_[static_cast<std::size_t>(n)][block];
    }

    /// True when partitions[T] consists of singletons.
    bool separates_atoms() const;

private:
    std::vector<double> probs_;
    int horizon_;
    std::vector<Partition> partitions_;
    std::vector<std::string> outcomes_;
    std::vector<std::vector<std::size_t>> block_index_;
    std::vector<std::vector<double>> block_probs_;
};

// =============================================================================
// Processes
// =============================================================================

enum class Measurability { adapted, predictable, raw };

/// Values X_n(ω) ∈ R^d for n = 0..T, stored time-major.
///
/// Discrete-time conventions used throughout: X_{n-} := X_{n-1},
/// ΔX_n := X_n - X_{n-1} for n >= 1 and ΔX_0 := X_0.
class Process {
public:
    Process() = default;
    Process(std::size_t steps, std::size_t atoms, std::size_t dim,
            Measurability kind = Measurability::raw);

    static Process zeros_like(const Process& other, Measurability kind);
    static Process zeros_for(const FilteredSpace& space, std::size_t dim,
                             Measurability kind = Measurability::raw);

    std::size_t steps() const { return steps_; }
    std::size_t atoms() const { return atoms_; }
    std::size_t dim() const { return dim_; }
    Measurability kind() const { return kind_; }
    void set_kind(Measurability kind) { kind_ = kind; }

    std::span<double> at(std::size_t n, std::size_t atom) {
        return {data_.data() + (n * atoms_ + atom) * dim_, dim_};
    }
    std::span<const double> at(std::size_t n, std::size_t atom) const {
        return {data_.data() + (n * atoms_ + atom) * dim_, dim_};
    }
    // Scalar shorthand for dim == 1.
    double& operator()(std::size_t n, std::size_t atom) { return data_[n * atoms_ + atom]; }
    double operator()(std::size_t n, std::size_t atom) const { return data_[n * atoms_ + atom]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double norm_at(std::size_t n, std::size_t atom) const;
    double max_abs() const;

private:
    std::size_t steps_ = 0;
    std::size_t atoms_ = 0;
    std::size_t dim_ = 0;
    Measurability kind_ = Measurability::raw;
    std::vector<double> data_;
};

/// A single F_T-measurable vector variable, values[atom * dim + i].
struct RandomVector {
    std::size_t dim = 1;
    std::vector<double> values;

    std::span<const double> at(std::size_t atom) const { return {values.data() + atom * dim, dim}; }
    std::span<double> at(std::size_t atom) { return {values.data() + atom * dim, dim}; }
    double norm_at(std::size_t atom) const;
};

RandomVector slice(const Process& x, std::size_t n);

// Elementwise helpers; shapes must agree.
Process add(const Process& a, const Process& b);
Process subtract(const Process& a, const Process& b);
Process scale(const Process& a, double factor);
Process increments(const Process& x);
// Scalar process ‖X_n(ω)‖.
Process pointwise_norm(const Process& x);

void check_shape(const FilteredSpace& space, const Process& x);
void check_same_shape(const Process& a, const Process& b);

/// Largest deviation of X_n from being constant on the blocks of partitions[m(n)],
/// where m(n) = n for adapted and n-1 for predictable processes.
double measurability_defect(const FilteredSpace& space, const Process& x, Measurability kind);
bool is_measurable(const FilteredSpace& space, const Process& x, Measurability kind,
                   double tol = 1e-12);

// =============================================================================
// Conditional expectation and martingales
// =============================================================================

/// Every time slice of X replaced by its conditional expectation given F_n.
Process cond_expect(const FilteredSpace& space, const Process& x, int n);
RandomVector cond_expect(const FilteredSpace& space, const RandomVector& x, int n);

/// E[X] for a scalar random variable given per atom.
double expectation(const FilteredSpace& space, std::span<const double> per_atom);
/// E[X_n] as a vector.
std::vector<double> expectation(const FilteredSpace& space, const Process& x, std::size_t n);

/// Adapted, M_0 = 0 and ‖E[ΔM_n | F_{n-1}]‖ <= tol for every n >= 1. The
/// tolerance is scaled by max(1, max |M|) so large-jump laws are judged on the
/// same relative footing.
bool is_martingale(const FilteredSpace& space, const Process& m, double tol = 1e-12);

// =============================================================================
// Random martingale generator
// =============================================================================

enum class JumpLaw { rademacher, centered_uniform, heavy_tail_truncated, poisson_compensated };

const char* to_string(JumpLaw law);
JumpLaw jump_law_from_string(const std::string& name);

inline constexpr std::size_t kDefaultAtomCap = std::size_t{1} << 20;

struct MartingaleSpec {
    std::uint64_t seed = 0;
    int branching = 2;
    int horizon = 1;
    std::size_t dim = 1;
    JumpLaw jump_law = JumpLaw::rademacher;
    double scale = 1.0;
    // Children of a block are equally likely unless this is set, in which
    // case their conditional probabilities are drawn at random.
    bool random_child_probs = false;
};

void validate(const MartingaleSpec& spec);

struct GeneratedMartingale {
    FilteredSpace space;
    Process martingale;
};

/// b-ary tree of depth T with an adapted martingale whose increments are
/// centred exactly within every block. Rademacher increments with even b are
/// balanced ±scale and need no centring.
GeneratedMartingale generate_martingale(const MartingaleSpec& spec,
                                        std::size_t atom_cap = kDefaultAtomCap);

// =============================================================================
// Stopping times
// =============================================================================

class StoppingTime {
public:
    StoppingTime(const FilteredSpace& space, std::vector<int> tau);

    static StoppingTime constant(const FilteredSpace& space, int n);
    /// First n with ‖X_n‖ >= level, T if the level is never reached.
    static StoppingTime hitting_time(const FilteredSpace& space, const Process& x, double level);

    int operator[](std::size_t atom) const { return tau_[atom]; }
    std::span<const int> values() const { return tau_; }

private:
    std::vector<int> tau_;
};

/// Throws ValidationError unless {tau <= n} is a union of blocks of
/// partitions[n] for every n.
void validate_stopping_time(const FilteredSpace& space, std::span<const int> tau);

/// X^tau_n = X_{min(n, tau)}.
Process stop_process(const FilteredSpace& space, const Process& x, const StoppingTime& tau);

} // namespace bdgkit
