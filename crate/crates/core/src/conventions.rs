//! The sign and index sheet printed by `agd conventions`. The copy in
//! `docs/CONVENTIONS.md` is generated from [`SHEET`].

pub const SHEET: &str = r"# Conventions

Indices: `i, j` run over coordinates `x_i` of the patch, `a, b, c` over
the frame `e_a` of E, and `α, β` over the frame `ξ_α` of F. Repeated
indices are summed. Every table below is written in a `.agd` file with the
same index order.

## Algebroids

| quantity | storage | meaning |
|---|---|---|
| anchor | `anchor[a][i]` | `ρ(e_a) = anchor[a][i] ∂_i` |
| structure functions | `bracket[a][b]` → components | `[e_a, e_b] = bracket[a][b]^c e_c` |

Bracket of sections, Leibniz along the anchor:

    [μ, ν] = μ^a ν^b [e_a, e_b] + ρ(μ)(ν^b) e_b − ρ(ν)(μ^a) e_a

Vector fields: `[X, Y]^i = X(Y^i) − Y(X^i)`. The tangent algebroid has the
frame `d_<coordinate>`, identity anchor and zero structure functions.

In a `.agd` file, `bracket a b` also sets `bracket b a` to the negative
unless `bracket b a` is given explicitly.

## Connections and forms

| quantity | storage | meaning |
|---|---|---|
| Christoffel symbols | `gamma[α][a]` → components | `∇_{ξ_α} e_a = gamma[α][a]^b e_b` |
| E-valued 2-form on F | `zeta[α][β]` → components | `ζ(ξ_α, ξ_β)`, antisymmetric |
| E-valued 1-form on F | `at[α]` → components | `λ(ξ_α)` |
| morphism E → F | `map[a]` → components | `K(e_a)` in the frame of F |

    ∇_X μ = X^α (μ^a Γ[α][a] + ρ_F(ξ_α)(μ^b) e_b)
    R_∇(X, Y)μ = ∇_X ∇_Y μ − ∇_Y ∇_X μ − ∇_{[X,Y]} μ

## Basic connections

    ∇bas_μ ν = [μ, ν]_E + ∇_{Kν} μ            (on E)
    ∇bas_μ X = [Kμ, X]_F + K(∇_X μ)          (on F)

Basic curvature:

    R∇bas(μ, ν)X = ∇_X[μ,ν] − [∇_X μ, ν] − [μ, ∇_X ν] − ∇_{∇bas_ν X} μ + ∇_{∇bas_μ X} ν

Torsions:

    t_bas(μ, ν) = ∇bas_μ ν − ∇bas_ν μ − [μ, ν]_E
    t_K(μ, ν)   = ∇_{Kμ} ν − ∇_{Kν} μ − [μ, ν]_E

Covariant derivative of the torsion, expanded with ∇ on all slots:

    (∇_X t_bas)(μ, ν) = ∇_X(t_bas(μ, ν)) − t_bas(∇_X μ, ν) − t_bas(μ, ∇_X ν)

Identities checked on frames for every `(∇, K)` with K a morphism:

    t_bas + t_K = 0
    R∇bas(μ, ν)X = (∇_X t_bas)(μ, ν) − R_∇(Kμ, X)ν + R_∇(Kν, X)μ
    R_{∇bas on E}(μ, ν)σ = −R∇bas(μ, ν)(Kσ)
    R_{∇bas on F}(μ, ν)X = −K(R∇bas(μ, ν)X)

## Adjustments

    d^{∇bas}ζ(X, Y, ν) = ∇bas_ν(ζ(X, Y)) − ζ(∇bas_ν X, Y) − ζ(X, ∇bas_ν Y)
    ∇ζ_X ν = ∇_X ν − ζ(X, Kν)
    d^{∇ζ}ζ(X, Y, Z) = ∇ζ_X ζ(Y, Z) − ∇ζ_Y ζ(X, Z) + ∇ζ_Z ζ(X, Y)
                       − ζ([X, Y], Z) + ζ([X, Z], Y) − ζ([Y, Z], X)

| flag | condition on all frame tuples |
|---|---|
| morphism | `ρ_F ∘ K = ρ_E` and `K[e_a, e_b] = [Ke_a, Ke_b]` |
| cartan | `R∇bas = 0` |
| covariant | `R_∇(X, Y)ν + d^{∇bas}ζ(X, Y, ν) = 0` |
| strict | `d^{∇ζ}ζ = 0` (vacuous when rank F < 3) |

Strict bracket and decomposition:

    H(μ, ν) = t_bas(μ, ν) + ζ(Kμ, Kν) = −t_K(μ, ν) + ζ(Kμ, Kν)
    [μ, ν]_E = H(μ, ν) + ∇ζ_{Kμ} ν − ∇ζ_{Kν} μ + ζ(Kμ, Kν)

Multiplicative Yang-Mills equations for `(∇ζ, H, ζ)`:

    ∇ζ H = 0,   R_{∇ζ}(X, Y)ν = H(ζ(X, Y), ν),   d^{∇ζ}ζ = 0

Change of splitting by `λ: F → E` (K = 0):

    ∇^λ_X μ = ∇_X μ + [λX, μ]_E
    ζ^λ = ζ + d^∇λ + ½[λ∧λ]
    d^∇λ(X, Y) = ∇_X λY − ∇_Y λX − λ[X, Y]_F,   ½[λ∧λ](X, Y) = [λX, λY]_E

## Extension algebroid

Frame of `A = F ⊕ E`: the frame of F followed by the frame of E; names
shared by both get the suffixes `_F` and `_E`.

    S = [μ, ν]_E + ∇_X ν − ∇_Y μ + ζ(X, Y)
    [(X, μ), (Y, ν)]_A = ([X + Kμ, Y + Kν]_F − K(S), S)
                       = ([X, Y]_F + ∇bas_μ Y − ∇bas_ν X − K(ζ(X, Y)), S)
    ρ_A(X, μ) = ρ_F(X) + ρ_E(μ)

Maps: `D(X, μ) = X + Kμ`, `ι(μ) = (−Kμ, μ)`, `ι̂(μ) = (0, μ)`,
`ψ(X, μ) = X`, `χ(X) = (X, 0)`, `χ̂(X, μ) = μ`.

Mackenzie's bracket for a bundle of Lie algebras (K = 0):

    [(X, μ), (Y, ν)] = ([X, Y]_F, [μ, ν] + ∇_X ν − ∇_Y μ + ζ(X, Y))

## Pullbacks

`φ: N = M × ℝ^k → M` projects onto the leading coordinates. The frame of
`φ!F` is the lifted frame of F followed by `d_<fibre coordinate>`.

    φ!F = {(X, v) ∈ φ*F ⊕ TN : dφ(v) = ρ_F(X)}

In the frame, components `(X, w)` stand for `(X, lift of ρ_F(X) + w)`
with `w` vertical, and the anchor is `ρ(X, w) = lift of ρ_F(X) + w`.

    φ!K(μ) = ((φ*K)μ, vertical part of ρ_{φ*E}(μ))
    ζ'((X, v), (Y, w)) = φ*ζ(X, Y)

## so(3) fixture

    [e1, e2] = e3,   [e2, e3] = e1,   [e3, e1] = e2
    ρ(e1) = x3 ∂2 − x2 ∂3,   ρ(e2) = x1 ∂3 − x3 ∂1,   ρ(e3) = x2 ∂1 − x1 ∂2

These anchors satisfy `[ρ(e_a), ρ(e_b)] = ρ([e_a, e_b])`.
";

#[cfg(test)]
mod tests {
    use super::SHEET;

    #[test]
    fn generated_page_is_current() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/CONVENTIONS.md");
        let page = std::fs::read_to_string(path).expect("docs/CONVENTIONS.md exists");
        assert_eq!(page, SHEET, "regenerate with `agd conventions > docs/CONVENTIONS.md`");
    }
}
