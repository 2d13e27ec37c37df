#include "gbk/carleman.hpp"
#include "gbk/diagnostics.hpp"
#include "gbk/dsmc.hpp"
#include "gbk/inequalities.hpp"
#include "gbk/kinetics.hpp"
#include "gbk/operators.hpp"
#include "gbk/spectrum.hpp"
#include "gbk/steady_state.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gbk;

namespace {

Vec3 to_vec(std::array<double, 3> const& a) { return {a[0], a[1], a[2]}; }
std::array<double, 3> from_vec(Vec3 const& v) { return {v.x, v.y, v.z}; }

py::array_t<double> velocities_array(std::vector<Vec3> const& vs)
{
    py::array_t<double> out({static_cast<py::ssize_t>(vs.size()), py::ssize_t{3}});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        auto const k = static_cast<py::ssize_t>(i);
        m(k, 0) = vs[i].x;
        m(k, 1) = vs[i].y;
        m(k, 2) = vs[i].z;
    }
    return out;
}

py::dict record_dict(MomentRecord const& r)
{
    py::dict d;
    d["t"] = r.t;
    d["mass"] = r.mass;
    d["momentum"] = from_vec(r.momentum);
    d["energy"] = r.energy;
    d["temperature"] = r.temperature;
    py::list norms;
    for (auto const& w : r.weighted_norms) {
        norms.append(w.value);
    }
    d["weighted_norms"] = norms;
    return d;
}

py::dict profile_dict(RadialProfile const& p)
{
    py::dict d;
    d["bin_edges"] = p.bin_edges;
    d["density"] = p.density;
    d["density_stderr"] = p.density_stderr;
    d["total_mass"] = p.total_mass;
    d["outside_mass"] = p.outside_mass;
    return d;
}

py::dict check_dict(CheckResult const& c)
{
    py::dict d;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["trials"] = c.trials;
    d["violations"] = c.violations;
    d["worst_slack"] = c.worst_slack;
    py::dict witness;
    for (auto const& [k, v] : c.witness) {
        witness[py::str(k)] = v;
    }
    d["witness"] = witness;
    return d;
}

} // namespace

PYBIND11_MODULE(_gbk, m)
{
    m.doc() = "Granular gas in a thermal bath: collision kinetics, DSMC and linearized operators";
    m.attr("__version__") = GBK_VERSION;

    py::class_<BathParams>(m, "BathParams")
        .def(py::init([](std::array<double, 3> u0, double theta0) {
                 BathParams b{to_vec(u0), theta0};
                 b.validate();
                 return b;
             }),
             py::arg("u0") = std::array<double, 3>{0.0, 0.0, 0.0}, py::arg("theta0") = 1.0)
        .def_property_readonly("u0", [](BathParams const& b) { return from_vec(b.u0); })
        .def_readonly("theta0", &BathParams::theta0);

    py::class_<WeightParams>(m, "WeightParams")
        .def(py::init([](double b, double beta, int q) {
                 WeightParams w{b, beta, q};
                 w.validate();
                 return w;
             }),
             py::arg("b") = 0.1, py::arg("beta") = 0.5, py::arg("q") = 1)
        .def_readonly("b", &WeightParams::b)
        .def_readonly("beta", &WeightParams::beta)
        .def_readonly("q", &WeightParams::q);

    m.def(
        "post_collision",
        [](std::array<double, 3> v, std::array<double, 3> w, std::array<double, 3> n, double alpha) {
            auto const out = post_collision_n(to_vec(v), to_vec(w), to_vec(n), alpha);
            return py::make_tuple(from_vec(out.v), from_vec(out.v_star));
        },
        py::arg("v"), py::arg("v_star"), py::arg("n"), py::arg("alpha"));
    m.def(
        "post_collision_sigma",
        [](std::array<double, 3> v, std::array<double, 3> w, std::array<double, 3> s, double alpha) {
            auto const out = post_collision_sigma(to_vec(v), to_vec(w), to_vec(s), alpha);
            return py::make_tuple(from_vec(out.v), from_vec(out.v_star));
        },
        py::arg("v"), py::arg("v_star"), py::arg("sigma"), py::arg("alpha"));
    m.def(
        "energy_change",
        [](std::array<double, 3> v, std::array<double, 3> w, std::array<double, 3> n, double alpha) {
            return energy_change(to_vec(v), to_vec(w), to_vec(n), alpha);
        },
        py::arg("v"), py::arg("v_star"), py::arg("n"), py::arg("alpha"));
    m.def("theta_sharp", &theta_sharp, py::arg("e"), py::arg("theta0") = 1.0);
    m.def("collision_frequency", &collision_frequency_nu_radial, py::arg("d"), py::arg("theta0") = 1.0);
    m.def("collision_frequency_quadrature", &collision_frequency_quadrature, py::arg("d"), py::arg("theta0") = 1.0);
    m.def(
        "kernel_k_e",
        [](std::array<double, 3> v, std::array<double, 3> v_star, double e, BathParams const& bath) {
            return kernel_k_e(to_vec(v), to_vec(v_star), e, bath);
        },
        py::arg("v"), py::arg("v_star"), py::arg("e"), py::arg("bath") = BathParams{});

    m.def(
        "simulate",
        [](std::size_t n, double t_end, double alpha, double e, BathParams const& bath, std::uint64_t seed,
           double init_theta, int threads, bool self_collisions, bool bath_collisions) {
            SimConfig cfg;
            cfg.n_particles = n;
            cfg.t_end = t_end;
            cfg.restitution = {alpha, e};
            cfg.bath = bath;
            cfg.seed = seed;
            cfg.init_theta = init_theta > 0.0 ? init_theta : bath.theta0;
            cfg.init_u = bath.u0;
            cfg.threads = threads;
            cfg.self_coupling = self_collisions ? 1.0 : 0.0;
            cfg.bath_coupling = bath_collisions ? 1.0 : 0.0;
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run(cfg);
            }
            py::list series;
            for (auto const& r : res.series) {
                series.append(record_dict(r));
            }
            py::dict out;
            out["series"] = series;
            out["velocities"] = velocities_array(res.final_state.velocities);
            out["dt"] = res.dt;
            out["self_collisions"] = res.self_collisions;
            out["bath_collisions"] = res.bath_collisions;
            return out;
        },
        py::arg("n_particles") = 10000, py::arg("t_end") = 1.0, py::arg("alpha") = 1.0, py::arg("e") = 1.0,
        py::arg("bath") = BathParams{}, py::arg("seed") = 1, py::arg("init_theta") = 0.0, py::arg("threads") = 0,
        py::arg("self_collisions") = true, py::arg("bath_collisions") = true);

    m.def(
        "steady_state",
        [](std::size_t n, double alpha, double e, BathParams const& bath, std::uint64_t seed, double t_end,
           double t_average, int threads) {
            SimConfig cfg;
            cfg.n_particles = n;
            cfg.t_end = t_end;
            cfg.restitution = {alpha, e};
            cfg.bath = bath;
            cfg.init_u = bath.u0;
            cfg.init_theta = bath.theta0;
            cfg.seed = seed;
            cfg.threads = threads;
            SteadyOptions opt;
            opt.t_average = t_average;
            SteadyStateResult r;
            {
                py::gil_scoped_release release;
                r = compute_steady_state(cfg, opt);
            }
            py::dict out;
            out["temperature"] = r.temperature;
            out["temperature_stderr"] = r.temperature_stderr;
            out["t_burn_in"] = r.t_burn_in;
            out["profile"] = profile_dict(r.profile);
            return out;
        },
        py::arg("n_particles") = 20000, py::arg("alpha") = 1.0, py::arg("e") = 1.0, py::arg("bath") = BathParams{},
        py::arg("seed") = 1, py::arg("t_end") = 60.0, py::arg("t_average") = 10.0, py::arg("threads") = 0);

    m.def(
        "assemble_operator",
        [](std::string const& kind, int n, double alpha, double e, BathParams const& bath, int threads) {
            auto const theta_s = theta_sharp(e, bath.theta0);
            auto const grid = VelocityGrid::make(6.0 * std::sqrt(theta_s), n, bath.u0, theta_s);
            AssemblyOptions opt;
            opt.threads = threads;
            OperatorMatrix op;
            {
                py::gil_scoped_release release;
                if (kind == "bath") {
                    op = assemble_bath_operator(grid, e, bath, opt);
                } else if (kind == "linearized") {
                    op = assemble_linearized(grid, alpha, e, bath, RadialDensity::maxwellian(bath.u0, theta_s), opt);
                } else {
                    throw std::invalid_argument("kind must be 'bath' or 'linearized'");
                }
            }
            auto const candidate = sample_on_grid(grid, RadialDensity::maxwellian(bath.u0, theta_s));
            py::dict out;
            out["matrix"] = op.entries;
            out["h"] = grid.h();
            out["R"] = grid.R;
            out["rate_scale"] = op.rate_scale;
            out["maxwellian"] = candidate;
            return out;
        },
        py::arg("kind") = "bath", py::arg("n") = 13, py::arg("alpha") = 1.0, py::arg("e") = 1.0,
        py::arg("bath") = BathParams{}, py::arg("threads") = 0);

    m.def(
        "eigenvalues",
        [](Eigen::MatrixXd const& a) {
            py::gil_scoped_release release;
            return dense_eigenvalues(a);
        },
        py::arg("matrix"));

    m.def(
        "power_split_check",
        [](double beta, std::size_t trials, std::uint64_t seed) {
            Rng rng = make_stream(seed);
            return check_dict(check_power_split(beta, trials, rng));
        },
        py::arg("beta"), py::arg("trials") = 100000, py::arg("seed") = 1);
    m.def(
        "stretched_gaussian_check",
        [](double b, double gamma, double beta, double beta0, std::size_t trials, std::uint64_t seed) {
            Rng rng = make_stream(seed);
            return check_dict(check_stretched_gaussian(b, gamma, beta, beta0, trials, rng));
        },
        py::arg("b"), py::arg("gamma"), py::arg("beta"), py::arg("beta0"), py::arg("trials") = 100000,
        py::arg("seed") = 1);
}
