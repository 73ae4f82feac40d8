#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlcl/config.hpp"
#include "nlcl/csv_io.hpp"
#include "nlcl/diagnostics.hpp"
#include "nlcl/errors.hpp"
#include "nlcl/studies.hpp"

namespace py = pybind11;
using namespace nlcl;

namespace {

py::array_t<double> state_to_array(const StateField& s, const GridSpec& grid) {
    py::array_t<double> out({s.n_components, s.cells});
    auto buf = out.mutable_unchecked<2>();
    for (int k = 0; k < s.n_components; ++k)
        for (int i = 0; i < s.cells; ++i) buf(k, i) = s.at(k, i);
    (void)grid;
    return out;
}

py::array_t<double> centers_to_array(const GridSpec& grid) {
    py::array_t<double> out(grid.cells);
    auto buf = out.mutable_unchecked<1>();
    for (int i = 0; i < grid.cells; ++i) buf(i) = grid.x_center(i);
    return out;
}

PiecewiseConstant pc_from_pairs(const std::vector<double>& edges,
                                const std::vector<double>& vals) {
    if (edges.size() != vals.size() + 1)
        throw ModelError("piecewise data: need len(edges) == len(values) + 1");
    return PiecewiseConstant{edges, vals};
}

py::dict table_to_dict(const ErrorTable& t) {
    py::list params, errors, rates, lambdas;
    for (const auto& r : t.rows) {
        params.append(r.parameter);
        errors.append(r.error);
        if (r.rate) rates.append(*r.rate);
        else rates.append(py::none());
        lambdas.append(r.lambda_used);
    }
    py::dict d;
    d["parameter_name"] = t.parameter_name;
    d["parameter"] = params;
    d["error"] = errors;
    d["rate"] = rates;
    d["lambda_used"] = lambdas;
    d["rates_above_floor"] = t.rates_above_floor();
    return d;
}

py::dict simulate_impl(const ModelSpec& model, double x_min, double x_max, double dx,
                       double T, double beta, std::optional<double> lambda,
                       const std::vector<double>& record_times, bool memoryless) {
    const auto grid = make_grid(x_min, x_max, dx);
    const auto tg = cfl_time_grid(dx, T, beta, model.lip_f, model.nu_sup, lambda);
    RunOptions opts;
    opts.record_times = record_times.empty() ? std::vector<double>{T} : record_times;
    const auto traj = memoryless ? run_memoryless(model, grid, tg, {beta, tg.lambda}, opts)
                                 : run(model, grid, tg, {beta, tg.lambda}, opts);
    py::dict out;
    out["x"] = centers_to_array(grid);
    out["dt"] = traj.dt;
    out["lambda"] = tg.lambda;
    out["n_steps"] = traj.n_steps;
    py::list times, states;
    for (size_t r = 0; r < traj.states.size(); ++r) {
        times.append(traj.record_times[r]);
        states.append(state_to_array(traj.states[r], grid));
    }
    out["times"] = times;
    out["states"] = states;
    out["final"] = state_to_array(traj.final_state, grid);
    py::list mass, tv;
    for (int k = 0; k < model.n; ++k) {
        mass.append(traj.scalars.back()[static_cast<size_t>(k)].mass);
        tv.append(traj.scalars.back()[static_cast<size_t>(k)].tv);
    }
    out["final_mass"] = mass;
    out["final_tv"] = tv;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "finite-volume solver for nonlocal conservation laws with memory";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<NumericsError>(m, "NumericsError", PyExc_RuntimeError);

    py::class_<SpatialKernel>(m, "SpatialKernel")
        .def_static("poly_bump", &SpatialKernel::poly_bump, py::arg("eta"))
        .def_static("tabulated", &SpatialKernel::tabulated, py::arg("x"), py::arg("y"))
        .def("value", &SpatialKernel::value)
        .def_property_readonly("support", &SpatialKernel::support)
        .def_property_readonly("amplitude", &SpatialKernel::amplitude)
        .def("mass", &SpatialKernel::mass)
        .def("cell_averages",
             [](const SpatialKernel& k, double dx) { return spatial_cell_averages(k, dx); },
             py::arg("dx"));

    py::class_<TemporalKernel>(m, "TemporalKernel")
        .def_static("poly_decay", &TemporalKernel::poly_decay)
        .def_static("tabulated", &TemporalKernel::tabulated, py::arg("x"), py::arg("y"))
        .def("value", &TemporalKernel::value)
        .def("mass", &TemporalKernel::mass)
        .def_property_readonly("first_moment", &TemporalKernel::first_moment);

    py::class_<ScaledTemporalKernel>(m, "ScaledTemporalKernel")
        .def(py::init<TemporalKernel, double>(), py::arg("base"), py::arg("delta"))
        .def("value", &ScaledTemporalKernel::value)
        .def_property_readonly("delta", &ScaledTemporalKernel::delta)
        .def_property_readonly("support", &ScaledTemporalKernel::support)
        .def_property_readonly("scaled_first_moment",
                               &ScaledTemporalKernel::scaled_first_moment)
        .def("cell_averages",
             [](const ScaledTemporalKernel& g, double dt) {
                 return temporal_cell_averages(g, dt);
             },
             py::arg("dt"));

    py::class_<ModelSpec>(m, "ModelSpec")
        .def_property_readonly("n", [](const ModelSpec& s) { return s.n; })
        .def_property_readonly("lip_f", [](const ModelSpec& s) { return s.lip_f; })
        .def_property_readonly("nu_sup", [](const ModelSpec& s) { return s.nu_sup; })
        .def_property_readonly("h1_warning", [](const ModelSpec& s) { return s.h1_warning; });

    m.def("keyfitz_kranzer_preset", &keyfitz_kranzer_preset, py::arg("eta"),
          py::arg("delta"),
          "two-component nonlocal system with aliased bump/decay kernels");

    m.def(
        "validate_model",
        [](const ModelSpec& s) {
            const auto r = validate_model(s);
            py::list issues;
            for (const auto& i : r.issues) {
                py::dict d;
                d["hypothesis"] = i.hypothesis;
                d["message"] = i.message;
                d["blocking"] = i.blocking;
                issues.append(d);
            }
            py::dict out;
            out["ok"] = r.ok();
            out["issues"] = issues;
            out["lip_f"] = r.lip_f;
            out["nu_sup"] = r.nu_sup;
            return out;
        },
        py::arg("model"));

    m.def(
        "cfl_lambda_max",
        [](double beta, double lip_f, double nu_max) {
            return cfl_time_grid(1.0, 0.0, beta, lip_f, nu_max).lambda_max;
        },
        py::arg("beta"), py::arg("lip_f"), py::arg("nu_max"),
        "CFL bound min(1, 4-6b, 6b)/(1 + 6*lip_f*nu_max)");

    m.def(
        "lf_flux",
        [](double v, double ul, double ur, const std::string& flux, double beta,
           double lambda) {
            return lf_flux(v, ul, ur, ScalarFlux::from_name(flux), {beta, lambda});
        },
        py::arg("v"), py::arg("u_left"), py::arg("u_right"), py::arg("flux") = "identity",
        py::arg("beta") = 1.0 / 3.0, py::arg("lambda") = 1.0 / 7.0);

    m.def("simulate", &simulate_impl, py::arg("model"), py::arg("x_min"), py::arg("x_max"),
          py::arg("dx"), py::arg("T"), py::arg("beta") = 0.3333,
          py::arg("lambda") = std::nullopt,
          py::arg("record_times") = std::vector<double>{}, py::arg("memoryless") = false);

    m.def(
        "l1_distance",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> a, double dx_a,
           py::array_t<double, py::array::c_style | py::array::forcecast> b, double dx_b,
           double x_min) {
            if (a.ndim() != 2 || b.ndim() != 2)
                throw ModelError("l1_distance: expected 2-D arrays (components, cells)");
            const auto ga = make_grid(x_min, x_min + dx_a * a.shape(1), dx_a);
            const auto gb = make_grid(x_min, x_min + dx_b * b.shape(1), dx_b);
            StateField sa(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
            StateField sb(static_cast<int>(b.shape(0)), static_cast<int>(b.shape(1)));
            std::copy(a.data(), a.data() + a.size(), sa.data.begin());
            std::copy(b.data(), b.data() + b.size(), sb.data.begin());
            return l1_distance(sa, ga, sb, gb);
        },
        py::arg("a"), py::arg("dx_a"), py::arg("b"), py::arg("dx_b"), py::arg("x_min") = 0.0);

    m.def("observed_rate", &observed_rate, py::arg("e_coarse"), py::arg("e_fine"));

    m.def(
        "delta_study",
        [](double eta, double x_min, double x_max, double dx, double T, double beta,
           std::optional<double> lambda, double delta0, int n_halvings) {
            StudyParams sp;
            sp.T = T;
            sp.beta = beta;
            sp.lambda = lambda;
            const auto grid = make_grid(x_min, x_max, dx);
            const auto table = delta_study(
                [eta](double d) { return keyfitz_kranzer_preset(eta, d); }, grid, sp, delta0,
                n_halvings);
            return table_to_dict(table);
        },
        py::arg("eta"), py::arg("x_min"), py::arg("x_max"), py::arg("dx"), py::arg("T"),
        py::arg("beta"), py::arg("lambda"), py::arg("delta0"), py::arg("n_halvings"));

    m.def(
        "mesh_study",
        [](double eta, double x_min, double x_max, double T, double beta,
           std::optional<double> lambda, double dx0, int n_halvings, double ratio,
           double dx_fine) {
            StudyParams sp;
            sp.T = T;
            sp.beta = beta;
            sp.lambda = lambda;
            const auto table = mesh_study(
                [eta](double, double d) { return keyfitz_kranzer_preset(eta, d); }, x_min,
                x_max, sp, dx0, n_halvings, ratio, dx_fine);
            return table_to_dict(table);
        },
        py::arg("eta"), py::arg("x_min"), py::arg("x_max"), py::arg("T"), py::arg("beta"),
        py::arg("lambda"), py::arg("dx0"), py::arg("n_halvings"), py::arg("ratio"),
        py::arg("dx_fine"));

    m.def(
        "verify",
        [](const ModelSpec& model, double x_min, double x_max, double dx, double T,
           double beta, std::optional<double> lambda, bool memoryless) {
            const auto grid = make_grid(x_min, x_max, dx);
            const auto tg = cfl_time_grid(dx, T, beta, model.lip_f, model.nu_sup, lambda);
            const auto rep = verify_run(model, grid, tg, {beta, tg.lambda}, memoryless);
            py::list entries;
            for (const auto& e : rep.entries) {
                py::dict d;
                d["check"] = e.check;
                d["component"] = e.component;
                d["worst"] = e.worst;
                d["tolerance"] = e.tolerance;
                d["pass"] = e.pass;
                entries.append(d);
            }
            py::dict out;
            out["entries"] = entries;
            out["all_pass"] = rep.all_pass();
            out["c9_empirical"] = rep.c9_empirical;
            return out;
        },
        py::arg("model"), py::arg("x_min"), py::arg("x_max"), py::arg("dx"), py::arg("T"),
        py::arg("beta") = 0.3333, py::arg("lambda") = std::nullopt,
        py::arg("memoryless") = false);

    m.def("piecewise_constant", &pc_from_pairs, py::arg("edges"), py::arg("values"),
          "helper for custom initial data descriptors");

    m.def(
        "custom_model",
        [](int n, const std::vector<std::string>& flux,
           const std::vector<std::string>& velocity, double eta, double delta,
           const std::vector<PiecewiseConstant>& initial) {
            ModelSpec spec;
            spec.n = n;
            for (const auto& f : flux) spec.flux.push_back(ScalarFlux::from_name(f));
            for (const auto& v : velocity)
                spec.velocity.push_back(VelocityMap::from_name(v, n));
            spec.kernels = KernelMatrix::shared(
                n, std::make_shared<const SpatialKernel>(SpatialKernel::poly_bump(eta)),
                std::make_shared<const ScaledTemporalKernel>(TemporalKernel::poly_decay(),
                                                             delta));
            spec.initial = initial;
            const auto rep = validate_model(spec);
            if (!rep.ok()) throw ModelError("custom model failed validation");
            spec.lip_f = rep.lip_f;
            spec.nu_sup = rep.nu_sup;
            spec.grad_nu_sup = rep.grad_nu_sup;
            spec.grad_nu_lip = rep.grad_nu_lip;
            for (const auto& i : rep.issues)
                if (!i.blocking) spec.h1_warning = true;
            return spec;
        },
        py::arg("n"), py::arg("flux"), py::arg("velocity"), py::arg("eta"), py::arg("delta"),
        py::arg("initial"));

    py::class_<PiecewiseConstant>(m, "PiecewiseConstant")
        .def_static("indicator", &PiecewiseConstant::indicator, py::arg("a"), py::arg("b"),
                    py::arg("height"))
        .def("value", &PiecewiseConstant::value)
        .def("total_mass", &PiecewiseConstant::total_mass);
}
