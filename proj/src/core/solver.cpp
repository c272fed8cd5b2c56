#include "solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>

#include <pybind11/embed.h>
#include <pybind11/numpy.h>

namespace py = pybind11;

namespace wildgrid {

namespace {

// Python-side shim: one function call per solve keeps the embed overhead low.
constexpr const char* kShimSource = R"PY(
import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog, milp, LinearConstraint, Bounds

from cvxopt import matrix as _cvm
from cvxopt import solvers as _cvs
_cvs.options.update({'show_progress': False, 'abstol': 1e-10, 'reltol': 1e-10,
                     'feastol': 1e-10, 'maxiters': 300})


def solve_milp(n, data, indices, indptr, rlb, rub, clb, cub, c, integ, mip_gap, time_limit):
    import os
    if os.environ.get('WILDGRID_DEBUG'):
        print('DBG n', n, 'data', data, 'indices', indices, 'indptr', indptr,
              'rlb', rlb, 'rub', rub, 'clb', clb, 'cub', cub, 'c', c, 'integ', integ, flush=True)
    cons = ()
    if len(rlb) > 0:
        A = sp.csr_matrix((data, indices, indptr), shape=(len(rlb), n))
        cons = LinearConstraint(A, rlb, rub)
    opts = {'mip_rel_gap': mip_gap, 'presolve': True}
    if np.isfinite(time_limit):
        opts['time_limit'] = float(time_limit)
    res = milp(c=c, constraints=cons, integrality=integ, bounds=Bounds(clb, cub), options=opts)
    x = res.x if res.x is not None else np.zeros(0)
    fun = res.fun if res.fun is not None else np.nan
    db = getattr(res, 'mip_dual_bound', None)
    if db is None or not np.isfinite(db):
        db = fun
    gap = getattr(res, 'mip_gap', None)
    if gap is None or not np.isfinite(gap):
        gap = 0.0
    return int(res.status), float(fun), np.asarray(x, dtype=float), float(db), float(gap)


def solve_lp(n, data, indices, indptr, rlb, rub, clb, cub, c, time_limit):
    m = len(rlb)
    A_eq = b_eq = A_ub = b_ub = None
    eq_pos = np.zeros(0, dtype=np.int64)
    if m > 0:
        A = sp.csr_matrix((data, indices, indptr), shape=(m, n))
        eq = rlb == rub
        eq_pos = np.flatnonzero(eq)
        if eq_pos.size:
            A_eq = A[eq_pos]
            b_eq = rub[eq_pos]
        ub_pos = np.flatnonzero(~eq & np.isfinite(rub))
        lb_pos = np.flatnonzero(~eq & np.isfinite(rlb))
        blocks, rhs = [], []
        if ub_pos.size:
            blocks.append(A[ub_pos]); rhs.append(rub[ub_pos])
        if lb_pos.size:
            blocks.append(-A[lb_pos]); rhs.append(-rlb[lb_pos])
        if blocks:
            A_ub = sp.vstack(blocks, format='csr')
            b_ub = np.concatenate(rhs)
    opts = {'presolve': True}
    if np.isfinite(time_limit):
        opts['time_limit'] = float(time_limit)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=np.column_stack((clb, cub)), method='highs-ds', options=opts)
    x = res.x if res.x is not None else np.zeros(0)
    fun = res.fun if res.fun is not None else np.nan
    duals = np.full(m, np.nan)
    if res.status == 0 and eq_pos.size:
        duals[eq_pos] = res.eqlin.marginals
    return int(res.status), float(fun), np.asarray(x, dtype=float), duals


def solve_qp(P, q, G, h, A, b):
    kw = {}
    if G is not None and len(h) > 0:
        kw['G'] = _cvm(G)
        kw['h'] = _cvm(h)
    if A is not None and len(b) > 0:
        kw['A'] = _cvm(A)
        kw['b'] = _cvm(b)
    try:
        sol = _cvs.qp(_cvm(P), _cvm(q), **kw)
    except (ValueError, ArithmeticError):
        return False, np.zeros(len(q))
    ok = sol['status'] == 'optimal'
    x = np.array(sol['x']).ravel() if sol['x'] is not None else np.zeros(len(q))
    return ok, x
)PY";

struct Csr {
    py::array_t<double> data;
    py::array_t<long> indices;
    py::array_t<long> indptr;
};

Csr to_csr(const MilpModel& model) {
    size_t nnz = 0;
    for (const auto& row : model.rows) nnz += row.size();
    Csr csr{py::array_t<double>(static_cast<py::ssize_t>(nnz)),
            py::array_t<long>(static_cast<py::ssize_t>(nnz)),
            py::array_t<long>(static_cast<py::ssize_t>(model.num_rows() + 1))};
    auto* d = csr.data.mutable_data();
    auto* ix = csr.indices.mutable_data();
    auto* ip = csr.indptr.mutable_data();
    size_t k = 0;
    ip[0] = 0;
    for (int r = 0; r < model.num_rows(); ++r) {
        for (auto [j, a] : model.rows[r]) {
            ix[k] = j;
            d[k] = a;
            ++k;
        }
        ip[r + 1] = static_cast<long>(k);
    }
    return csr;
}

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

SolveStatus map_status(int scipy_status) {
    switch (scipy_status) {
        case 0: return SolveStatus::Optimal;
        case 1: return SolveStatus::LimitReached;
        case 2: return SolveStatus::Infeasible;
        case 3: return SolveStatus::Unbounded;
        default: throw BackendError("solver reported a numerical failure (status 4)");
    }
}

}  // namespace

struct MilpBackend::Impl {
    py::object solve_milp_fn, solve_lp_fn, solve_qp_fn;
};

MilpBackend::MilpBackend() {
    const char* backend = std::getenv("WILDGRID_BACKEND");
    if (backend && std::string(backend) != "scipy-highs")
        throw BackendError(std::string("unknown solver backend: ") + backend);
    if (!Py_IsInitialized()) py::initialize_interpreter();
    try {
        py::dict shim;
        shim["__builtins__"] = py::module_::import("builtins");
        py::exec(kShimSource, shim);
        impl_ = new Impl{shim["solve_milp"], shim["solve_lp"], shim["solve_qp"]};
    } catch (const py::error_already_set& e) {
        throw BackendError(std::string("failed to load the scipy backend: ") + e.what());
    }
    // release the GIL so later calls can acquire it from any thread
    PyEval_SaveThread();
}

MilpBackend& MilpBackend::instance() {
    static MilpBackend backend;
    return backend;
}

SolveOutcome MilpBackend::solve_mip(const MilpModel& model, const SolverParams& params) {
    auto t0 = std::chrono::steady_clock::now();
    py::gil_scoped_acquire gil;
    SolveOutcome out;
    try {
        Csr csr = to_csr(model);
        py::array_t<double> integ(model.num_cols());
        for (int j = 0; j < model.num_cols(); ++j) integ.mutable_data()[j] = model.is_integer[j] ? 1.0 : 0.0;
        py::tuple res = impl_->solve_milp_fn(
            model.num_cols(), csr.data, csr.indices, csr.indptr, to_array(model.row_lb),
            to_array(model.row_ub), to_array(model.col_lb), to_array(model.col_ub),
            to_array(model.obj), integ, params.mip_gap, params.time_limit);
        out.status = map_status(res[0].cast<int>());
        double fun = res[1].cast<double>();
        auto x = res[2].cast<py::array_t<double>>();
        out.primal.assign(x.data(), x.data() + x.size());
        if (out.primal.empty() || std::isnan(fun)) {
            out.primal.clear();
            out.objective = std::numeric_limits<double>::quiet_NaN();
        } else {
            out.objective = fun + model.obj_offset;
        }
        double db = res[3].cast<double>();
        out.dual_bound = std::isnan(db) ? -kInf : db + model.obj_offset;
        out.gap = res[4].cast<double>();
    } catch (const py::error_already_set& e) {
        throw BackendError(std::string("MIP solve failed: ") + e.what());
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

SolveOutcome MilpBackend::solve_lp(const MilpModel& model, const SolverParams& params) {
    if (model.has_integrality())
        throw BackendError("solve_lp called on a model with integrality restrictions");
    auto t0 = std::chrono::steady_clock::now();
    py::gil_scoped_acquire gil;
    SolveOutcome out;
    try {
        Csr csr = to_csr(model);
        py::tuple res = impl_->solve_lp_fn(
            model.num_cols(), csr.data, csr.indices, csr.indptr, to_array(model.row_lb),
            to_array(model.row_ub), to_array(model.col_lb), to_array(model.col_ub),
            to_array(model.obj), params.time_limit);
        out.status = map_status(res[0].cast<int>());
        double fun = res[1].cast<double>();
        auto x = res[2].cast<py::array_t<double>>();
        out.primal.assign(x.data(), x.data() + x.size());
        if (out.primal.empty() || std::isnan(fun)) {
            out.primal.clear();
            out.objective = std::numeric_limits<double>::quiet_NaN();
        } else {
            out.objective = fun + model.obj_offset;
        }
        out.dual_bound = out.objective;
        auto duals = res[3].cast<py::array_t<double>>();
        out.row_duals.assign(duals.data(), duals.data() + duals.size());
    } catch (const py::error_already_set& e) {
        throw BackendError(std::string("LP solve failed: ") + e.what());
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

MilpBackend::QpResult MilpBackend::solve_qp(int n, const std::vector<double>& P,
                                            const std::vector<double>& q,
                                            const std::vector<double>& G,
                                            const std::vector<double>& h,
                                            const std::vector<double>& A,
                                            const std::vector<double>& b) {
    py::gil_scoped_acquire gil;
    QpResult out;
    try {
        // inputs are row-major; cvxopt wants column-major ('d' typecode) matrices
        auto colmajor = [](const std::vector<double>& v, int rows, int cols) -> py::object {
            if (rows == 0) return py::none();
            py::array_t<double, py::array::f_style> a({rows, cols});
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) a.mutable_at(r, c) = v[static_cast<size_t>(r) * cols + c];
            return a;
        };
        int mg = static_cast<int>(h.size());
        int ma = static_cast<int>(b.size());
        py::tuple res = impl_->solve_qp_fn(colmajor(P, n, n), to_array(q), colmajor(G, mg, n),
                                           to_array(h), colmajor(A, ma, n), to_array(b));
        out.ok = res[0].cast<bool>();
        auto x = res[1].cast<py::array_t<double>>();
        out.x.assign(x.data(), x.data() + x.size());
    } catch (const py::error_already_set& e) {
        throw BackendError(std::string("QP solve failed: ") + e.what());
    }
    return out;
}

}  // namespace wildgrid
