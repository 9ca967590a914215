#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace tandemq {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument outside the domain of a formula (zero beta, zero alpha, bad dimension...).
class DomainError : public Error {
public:
    using Error::Error;
};

class UnstableRates : public Error {
public:
    using Error::Error;
};

/// Raised when mu1 == mu2 (or any pair in 3d) and the caller asked for a
/// formula that divides by the difference.
class EqualRates : public Error {
public:
    using Error::Error;
};

class DegenerateDiscriminant : public Error {
public:
    explicit DegenerateDiscriminant(std::complex<double> beta)
        : Error("discriminant vanishes at beta"), beta_(beta) {}
    std::complex<double> beta() const noexcept { return beta_; }

private:
    std::complex<double> beta_;
};

class NotConverged : public Error {
public:
    NotConverged(std::size_t sweeps, double residual)
        : Error("Gauss-Seidel did not converge after " + std::to_string(sweeps) +
                " sweeps (last relative update " + std::to_string(residual) + ")"),
          sweeps_(sweeps), residual_(residual) {}
    std::size_t sweeps() const noexcept { return sweeps_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t sweeps_;
    double residual_;
};

class RankDeficientBasis : public Error {
public:
    using Error::Error;
};

class InadmissibleBasisElement : public Error {
public:
    InadmissibleBasisElement(std::complex<double> beta, std::string reason)
        : Error("inadmissible basis element: " + reason), beta_(beta),
          reason_(std::move(reason)) {}
    std::complex<double> beta() const noexcept { return beta_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::complex<double> beta_;
    std::string reason_;
};

}  // namespace tandemq
