/*
Copyright 2026 The hiersmooth Authors

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

#ifndef HIERSMOOTH_HIERSMOOTH_HPP_
#define HIERSMOOTH_HIERSMOOTH_HPP_

#include "hiersmooth/bilayer.hpp"
#include "hiersmooth/instance.hpp"
#include "hiersmooth/instgen.hpp"
#include "hiersmooth/l1_tree.hpp"
#include "hiersmooth/linf_dag.hpp"
#include "hiersmooth/oracle.hpp"
#include "hiersmooth/rational.hpp"
#include "hiersmooth/simplex.hpp"

#endif  // HIERSMOOTH_HIERSMOOTH_HPP_
