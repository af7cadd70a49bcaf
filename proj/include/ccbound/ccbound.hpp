#pragma once

// Bound states of coupled-channel Schroedinger systems -Y'' + V(x) Y = E Y:
// constant-reference-potential propagation of the R-matrix Psi = Y (Y')^{-1}
// in projective (Moebius) form, phase-sum eigenvalue indexing, two-sided
// shooting with Newton refinement, and eigenfunction recovery.

#include "errors.hpp"
#include "kernels.hpp"
#include "smallmat.hpp"
#include "problems.hpp"
#include "mesh.hpp"
#include "cp_step.hpp"
#include "riccati.hpp"
#include "prufer.hpp"
#include "shooting.hpp"
#include "eigenfunction.hpp"
#include "io.hpp"
#include "run.hpp"
