/*
 Copyright 2026 The OLC Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <stdexcept>
#include <string>

namespace olc {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class NotStronglyStable : public Error {
public:
    NotStronglyStable(double radius)
        : Error("system matrix is not strongly stable: estimated spectral radius " +
                std::to_string(radius) + " >= 1"),
          radius_(radius) {}
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

// Target state is not on the steady-state manifold (Bu = (I-A)z has no solution).
class UnreachableTarget : public Error {
public:
    UnreachableTarget(double residual, double tol)
        : Error("target is not a steady state: residual " + std::to_string(residual) +
                " exceeds tolerance " + std::to_string(tol)),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ProjectionFailure : public Error {
public:
    ProjectionFailure(int iterations, double movement)
        : Error("projection did not converge after " + std::to_string(iterations) +
                " iterations (last movement " + std::to_string(movement) + ")"),
          iterations_(iterations), movement_(movement) {}
    int iterations() const noexcept { return iterations_; }
    double movement() const noexcept { return movement_; }

private:
    int iterations_;
    double movement_;
};

class Unsupported : public Error {
public:
    using Error::Error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace olc
