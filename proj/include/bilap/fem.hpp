#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bilap/conditions.hpp"
#include "bilap/graph.hpp"

namespace bilap {

/// Uniform subdivision of each edge into n_e >= 1 elements.
struct Mesh {
    std::vector<int> elements_per_edge;

    static Mesh uniform(const MetricGraph& graph, int n);
    int elements(int e) const { return elements_per_edge[e]; }
};

/// Exact bending-stiffness and consistent-mass matrices of the cubic
/// Hermite shape functions on an element of length h, dof order
/// (u_left, u'_left, u_right, u'_right).
std::pair<Eigen::Matrix4d, Eigen::Matrix4d> hermite_element_matrices(double h);

/// Scalar function sampled edgewise: f(edge index, coordinate in [0, l_e]).
using EdgeFunction = std::function<double(int, double)>;

/// Dof bookkeeping for an edgewise mesh with either two dofs per node
/// (value + first derivative, Hermite) or one (value, P1).
class DofMap {
public:
    DofMap(const MetricGraph& graph, const Mesh& mesh, int dofs_per_node);

    int dofs_per_node() const { return dofs_per_node_; }
    int total_dofs() const { return total_dofs_; }
    int total_nodes() const { return total_nodes_; }
    int nodes_on_edge(int e) const { return nodes_per_edge_[e]; }

    int node_index(int e, int node) const { return node_offset_[e] + node; }
    int value_dof(int e, int node) const {
        return dof_offset_[e] + dofs_per_node_ * node;
    }
    int derivative_dof(int e, int node) const {
        return dof_offset_[e] + dofs_per_node_ * node + 1;
    }

    /// (edge, coordinate) of every global node, in node-index order.
    const std::vector<std::pair<int, double>>& node_positions() const {
        return positions_;
    }

private:
    int dofs_per_node_;
    int total_dofs_ = 0;
    int total_nodes_ = 0;
    std::vector<int> nodes_per_edge_;
    std::vector<int> dof_offset_;
    std::vector<int> node_offset_;
    std::vector<std::pair<int, double>> positions_;
};

/// Generalized eigenpairs of a reduced system: eigenvalues ascending,
/// eigenvectors M-orthonormal, in reduced coordinates.
struct EigenDecomposition {
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;
};

/// Constrained stiffness/mass pair for one operator realization: the
/// essential constraint (traces in Y) is eliminated through the
/// orthonormal basis Z of the admissible dof subspace; natural conditions
/// are not imposed and hold weakly.
class ReducedSystem {
public:
    enum class Kind { biharmonic, laplacian };

    ReducedSystem(MetricGraph graph, Mesh mesh, DofMap dofs, Kind kind,
                  std::string condition_name, Eigen::MatrixXd trace_map,
                  Eigen::MatrixXcd z, Eigen::MatrixXd m_full, Eigen::MatrixXcd k_y,
                  Eigen::MatrixXcd m_y);

    const MetricGraph& graph() const { return graph_; }
    const Mesh& mesh() const { return mesh_; }
    const DofMap& dofs() const { return dofs_; }
    Kind kind() const { return kind_; }
    const std::string& condition_name() const { return condition_name_; }

    const Eigen::MatrixXcd& k_reduced() const { return k_y_; }
    const Eigen::MatrixXcd& m_reduced() const { return m_y_; }
    const Eigen::MatrixXd& trace_map() const { return trace_map_; }
    const Eigen::MatrixXcd& constraint_basis() const { return z_; }
    int reduced_dim() const { return static_cast<int>(z_.cols()); }

    /// True when the reduced pair and the constraint basis are real, so the
    /// semigroup maps real data to real data. Real systems are solved with
    /// the real symmetric path, which pins the eigenvector phases.
    bool is_real() const;

    /// Full dof vector from reduced coordinates.
    Eigen::VectorXcd full_from_reduced(const Eigen::VectorXcd& v) const;
    /// Values at mesh nodes (real part) of a full dof vector.
    Eigen::VectorXd nodal_values(const Eigen::VectorXcd& full) const;

    /// M-orthogonal projection of nodal samples of f (derivative dofs from
    /// difference quotients when `derivative` is absent) onto the
    /// constrained space; returns reduced coordinates.
    Eigen::VectorXcd project(const EdgeFunction& f,
                             const EdgeFunction* derivative = nullptr) const;

    /// Same projection starting from values given directly at the mesh
    /// nodes (derivative dofs zero).
    Eigen::VectorXcd project_nodal(const Eigen::VectorXd& nodal) const;

    /// Mass-weighted mean: integral of the represented function divided by
    /// the total length.
    double mean_value(const Eigen::VectorXcd& reduced) const;
    /// L2 norm of the represented function.
    double l2_norm(const Eigen::VectorXcd& reduced) const;

    /// Full generalized eigendecomposition, computed once and cached.
    const EigenDecomposition& eigen() const;

    /// Piecewise-constant third derivative of a Hermite dof vector on one
    /// element (biharmonic systems only).
    double third_derivative(const Eigen::VectorXcd& full, int edge, int element) const;

    /// Second derivative of a Hermite dof vector at an edge endpoint,
    /// evaluated on the adjacent element.
    double second_derivative_at(const Eigen::VectorXcd& full, int edge, bool right) const;

private:
    MetricGraph graph_;
    Mesh mesh_;
    DofMap dofs_;
    Kind kind_;
    std::string condition_name_;
    Eigen::MatrixXd trace_map_;
    Eigen::MatrixXcd z_;
    Eigen::MatrixXd m_full_;
    Eigen::MatrixXcd k_y_;
    Eigen::MatrixXcd m_y_;
    mutable std::optional<EigenDecomposition> eigen_;
};

/// Conforming Hermite discretization of the quadratic form
/// sum_e int u'' v'' - (R u^{0,1}, v^{0,1}) on {traces in Y}.
ReducedSystem assemble(const MetricGraph& graph, const Mesh& mesh,
                       const ConditionYR& condition);

/// Companion P1 discretization of sum_e int u' v' with continuity across
/// vertices (Kirchhoff natural): the second-order reference operator for
/// the square-relation check.
ReducedSystem assemble_laplacian_ck(const MetricGraph& graph, const Mesh& mesh);

/// k smallest generalized eigenpairs.
EigenDecomposition eigensolve(const ReducedSystem& system, int k);

/// Multiplicity of the zero eigenvalue, detected through the relative-gap
/// rule; throws AmbiguousGap when no clear 1e3 gap separates the kernel
/// cluster from the rest.
int kernel_dimension(const ReducedSystem& system);

/// Solution snapshots of u_t = -A u by spectral expansion.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::pair<int, double>> nodes;  ///< (edge, x) per column
    Eigen::MatrixXd values;                     ///< times x nodes
    std::vector<double> min_values;             ///< min nodal value per time
    double mean = 0.0;                          ///< mass-weighted mean of f0
    std::vector<double> distance_to_mean;       ///< L2 distance per time
};
Trajectory evolve(const ReducedSystem& system, const EdgeFunction& f0,
                  const std::vector<double>& times, int mode_count = -1,
                  const EdgeFunction* f0_derivative = nullptr);

/// Heat-kernel sup estimate max_{x,y} |sum_j e^{-lambda_j t} phi_j(x) phi_j(y)|
/// over mesh nodes. Requires t > 0.
double kernel_sup_bound(const ReducedSystem& system, double t);

/// Max over vertices of |sum of outward third derivatives| for a reduced
/// vector; measures how well the natural Kirchhoff condition is met.
double kirchhoff_defect(const ReducedSystem& system, const Eigen::VectorXcd& reduced);

}  // namespace bilap
