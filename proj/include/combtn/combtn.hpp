#pragma once

#include "combtn/checked.hpp"
#include "combtn/costmodel.hpp"
#include "combtn/engine.hpp"
#include "combtn/network.hpp"
#include "combtn/params.hpp"
#include "combtn/tensor.hpp"
