#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfmmlab/agents.hpp"
#include "cfmmlab/amm_pool.hpp"
#include "cfmmlab/calibration.hpp"
#include "cfmmlab/engine.hpp"
#include "cfmmlab/greeks.hpp"
#include "cfmmlab/price_process.hpp"

namespace py = pybind11;
using namespace cfmm;

PYBIND11_MODULE(_cfmmlab, m) {
    m.doc() = "Constant-product market maker LP valuation engine";

    py::class_<DiffusionParams>(m, "DiffusionParams")
        .def(py::init<double, double>(), py::arg("mu") = 0.0, py::arg("sigma") = 0.0)
        .def_readwrite("mu", &DiffusionParams::mu)
        .def_readwrite("sigma", &DiffusionParams::sigma);

    py::class_<JumpParams>(m, "JumpParams")
        .def(py::init<double, double, double>(), py::arg("lambda_") = 0.0, py::arg("mu") = 0.0,
             py::arg("sigma") = 0.0)
        .def_readwrite("lambda_", &JumpParams::lambda)
        .def_readwrite("mu", &JumpParams::mu)
        .def_readwrite("sigma", &JumpParams::sigma);

    py::class_<MJDParams>(m, "MJDParams")
        .def(py::init<>())
        .def_static("risk_neutral", &MJDParams::risk_neutral, py::arg("sigma_d"),
                    py::arg("lambda_j"), py::arg("sigma_j"))
        .def_readwrite("diffusion", &MJDParams::diffusion)
        .def_readwrite("jumps", &MJDParams::jumps);

    py::class_<PoolState>(m, "PoolState")
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &PoolState::x)
        .def_readwrite("y", &PoolState::y);

    py::class_<FeeParams>(m, "FeeParams")
        .def(py::init<double>(), py::arg("gamma") = 0.997)
        .def_readwrite("gamma", &FeeParams::gamma);

    py::class_<Fill>(m, "Fill")
        .def(py::init<double, double>(), py::arg("u_x") = 0.0, py::arg("u_y") = 0.0)
        .def_readwrite("u_x", &Fill::u_x)
        .def_readwrite("u_y", &Fill::u_y)
        .def("is_zero", &Fill::is_zero);

    py::class_<PriceBand>(m, "PriceBand")
        .def_readonly("lo", &PriceBand::lo)
        .def_readonly("hi", &PriceBand::hi)
        .def("contains", &PriceBand::contains);

    m.def("jump_compensator", &jump_compensator, py::arg("jumps"));
    m.def("log_return_variance", &log_return_variance, py::arg("params"), py::arg("dt"));
    m.def("pool_implied_price", &pool_implied_price, py::arg("state"));
    m.def("no_trade_band", &no_trade_band, py::arg("state"), py::arg("fees"));
    m.def("optimal_trade", &optimal_trade, py::arg("state"), py::arg("p_tilde"), py::arg("fees"));
    m.def("apply_trade", &apply_trade, py::arg("state"), py::arg("fill"));
    m.def("pool_value", &pool_value, py::arg("state"), py::arg("p"));
    m.def("impermanent_loss", &impermanent_loss, py::arg("initial"), py::arg("current"),
          py::arg("p"));
    m.def("invert_trade", &invert_trade, py::arg("pre_state"), py::arg("fill"), py::arg("fees"));
    m.def("analytic_gamma_constant_product", &analytic_gamma_constant_product);
    m.def("lvr", &lvr, py::arg("variance_per_day"), py::arg("pool_value"), py::arg("dt"));

    py::class_<ArbParams>(m, "ArbParams")
        .def(py::init<double>(), py::arg("edge_bps") = 0.0)
        .def_readwrite("edge_bps", &ArbParams::edge_bps);

    py::class_<NT1Params>(m, "NT1Params")
        .def(py::init<double, double>(), py::arg("lambda_") = 0.0, py::arg("sigma_delta") = 0.0)
        .def_readwrite("lambda_", &NT1Params::lambda)
        .def_readwrite("sigma_delta", &NT1Params::sigma_delta);

    py::class_<NT2Params>(m, "NT2Params")
        .def(py::init<double, double>(), py::arg("rate") = 0.0, py::arg("size_scale") = 1.0)
        .def_readwrite("rate", &NT2Params::rate)
        .def_readwrite("size_scale", &NT2Params::size_scale);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("horizon_days", &SimConfig::horizon_days)
        .def_readwrite("trials", &SimConfig::trials)
        .def_readwrite("block_interval", &SimConfig::block_interval)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("mjd", &SimConfig::mjd)
        .def_readwrite("fees", &SimConfig::fees)
        .def_readwrite("arb", &SimConfig::arb)
        .def_readwrite("nt1", &SimConfig::nt1)
        .def_readwrite("nt2", &SimConfig::nt2)
        .def_readwrite("initial_price", &SimConfig::initial_price)
        .def_readwrite("initial_pool_value", &SimConfig::initial_pool_value)
        .def_readwrite("initial_log_ratio", &SimConfig::initial_log_ratio)
        .def_readwrite("equilibrium_samples", &SimConfig::equilibrium_samples)
        .def_readwrite("threads", &SimConfig::threads);

    py::class_<TrialResult>(m, "TrialResult")
        .def_readonly("pnl", &TrialResult::pnl)
        .def_readonly("volume", &TrialResult::volume)
        .def_readonly("fee_income", &TrialResult::fee_income)
        .def_readonly("arb_trades", &TrialResult::arb_trades)
        .def_readonly("noise_trades", &TrialResult::noise_trades)
        .def_readonly("final_log_ratio", &TrialResult::final_log_ratio);

    py::class_<BatchStats>(m, "BatchStats")
        .def_readonly("mean_pnl_bps_per_day", &BatchStats::mean_pnl_bps_per_day)
        .def_readonly("stderr_bps_per_day", &BatchStats::stderr_bps_per_day)
        .def_readonly("mean_fee_bps_per_day", &BatchStats::mean_fee_bps_per_day)
        .def_readonly("mean_volume", &BatchStats::mean_volume)
        .def_readonly("arb_trades_per_day", &BatchStats::arb_trades_per_day)
        .def_readonly("noise_trades_per_day", &BatchStats::noise_trades_per_day)
        .def_readonly("trials", &BatchStats::trials);

    m.def("run_trial", py::overload_cast<const SimConfig&, int>(&run_trial), py::arg("config"),
          py::arg("trial_index"));
    m.def("run_batch", &run_batch, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("stderr", &Estimate::stderr_value);

    m.def("estimate_gamma", &estimate_gamma, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ReturnSeries>(m, "ReturnSeries")
        .def(py::init<>())
        .def_readwrite("dt", &ReturnSeries::dt)
        .def_readwrite("returns", &ReturnSeries::returns);

    py::class_<MleFit>(m, "MleFit")
        .def_readonly("params", &MleFit::params)
        .def_readonly("loglik", &MleFit::loglik)
        .def_readonly("converged", &MleFit::converged);

    m.def("mjd_log_likelihood", &mjd_log_likelihood, py::arg("series"), py::arg("params"),
          py::arg("n_max") = 3);
    m.def(
        "fit_mjd",
        [](const ReturnSeries& series, int n_max, int starts) {
            MleOptions options;
            options.n_max = n_max;
            options.starts = starts;
            return fit_mjd(series, options);
        },
        py::arg("series"), py::arg("n_max") = 3, py::arg("starts") = 8,
        py::call_guard<py::gil_scoped_release>());
}
