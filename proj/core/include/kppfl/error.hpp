/*
   Copyright 2026 The kppfl Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace kppfl {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition or invalid argument combination.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Spectral density is negative, non-finite, or has a non-summable tail.
class SpectrumError : public Error {
public:
    using Error::Error;
};

/// A requested size exceeds a configured maximum.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Non-finite particle position produced during mutation.
class BlowUpError : public Error {
public:
    using Error::Error;
};

/// Fitness or mass cannot be normalized.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Configuration document failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Throws ContractError with `message` when `condition` is false.
void require(bool condition, const std::string& message);

} // namespace kppfl
