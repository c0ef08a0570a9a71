/*
 * Copyright 2026 The chakit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Python bindings: a thin layer over the CLI driver plus a few pure
// functions. JSON crosses the boundary as text; the package decodes it.

#include "chakit/cli.hpp"
#include "chakit/cost.hpp"
#include "chakit/ctl.hpp"
#include "chakit/error.hpp"
#include "chakit/model_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <tuple>

namespace py = pybind11;

namespace {

std::tuple<int, std::string, std::string> run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = chakit::run_command(args, out, err);
    }
    return {code, out.str(), err.str()};
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Cancer hybrid automata toolkit";
    static py::exception<chakit::Error> error(m, "ChakitError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const chakit::Error& e) {
            PyErr_SetString(error.ptr(), (std::string(e.kind()) + ": " + e.what()).c_str());
        }
    });

    m.def("run", &run, py::arg("args"),
          "Runs a chakit subcommand, returns (exit_code, stdout, stderr).");
    m.def(
        "parse_ctl", [](const std::string& text) { return chakit::to_string(*chakit::parse_ctl(text)); },
        py::arg("formula"), "Parses a CTL formula and returns its canonical text.");
    m.def(
        "load_model_json",
        [](const std::string& path) { return chakit::to_json(chakit::load_model(path)).dump(); },
        py::arg("path"), "Loads and validates a model file; returns the normalized model as JSON text.");
    m.def("pareto_dominates", &chakit::pareto_dominates, py::arg("x"), py::arg("y"),
          "True iff x is componentwise <= y and strictly smaller somewhere.");

    m.attr("EXIT_OK") = static_cast<int>(chakit::exit_ok);
    m.attr("EXIT_DOMAIN_ERROR") = static_cast<int>(chakit::exit_domain_error);
    m.attr("EXIT_USAGE") = static_cast<int>(chakit::exit_usage);
    m.attr("EXIT_NEGATIVE") = static_cast<int>(chakit::exit_negative);
    m.attr("EXIT_UNSUPPORTED") = static_cast<int>(chakit::exit_unsupported);
    m.attr("EXIT_UNVERIFIED") = static_cast<int>(chakit::exit_unverified);
}
