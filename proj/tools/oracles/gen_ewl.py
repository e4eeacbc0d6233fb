# Reference values for the lifetime-distribution tests, mpmath 40 digits.
import mpmath as mp
mp.mp.dps = 40

def em(x, n=17): return mp.nstr(x, n)

def make(a, b, g, th):
    a, b, g, th = map(mp.mpf, (a, b, g, th))
    L = -mp.log(1 - th)
    def w(y): return (b*y)**g
    def G(y): return -mp.expm1(-w(y))
    def pdf(y):
        y = mp.mpf(y)
        u = mp.e**(-w(y))
        Ga = G(y)**a
        return a*th*g*b**g*y**(g-1)*u*G(y)**(a-1)/(L*(1-th*Ga))
    def cdf(y): return mp.log(1-th*G(y)**a)/mp.log(1-th)
    def sf(y): return 1 - cdf(y)
    def quantile(xi):
        xi = mp.mpf(xi)
        inner = (1-(1-th)**xi)/th
        return (1/b)*(-mp.log(1-inner**(1/a)))**(1/g)
    return a, b, g, th, L, pdf, cdf, sf, quantile

def qpts(quantile):
    return [0] + [quantile(q) for q in ('0.05','0.25','0.5','0.75','0.95','0.999','0.9999999')] + [mp.inf]

def report(tag, a, b, g, th, ys, t_res, p_curve, t_mgf=None, renyi_rs=('0.5','2.0','3.0')):
    a,b,g,th,L,pdf,cdf,sf,quantile = make(a,b,g,th)
    pts = qpts(quantile)
    print(f"== {tag}: alpha={a} beta={b} gamma={g} theta={th} ==")
    for y in ys:
        y = mp.mpf(y)
        print(f"  y={y}: pdf={em(pdf(y))} cdf={em(cdf(y))} sf={em(sf(y))} hazard={em(pdf(y)/sf(y))} rhazard={em(pdf(y)/cdf(y))}")
    for xi in ('0.3','0.9'):
        print(f"  quantile({xi})={em(quantile(xi))}")
    mus = [mp.quad(lambda y: y**k * pdf(y), pts) for k in (1,2,3,4)]
    for k,m in enumerate(mus,1): print(f"  EY^{k}={em(m)}")
    mu = mus[0]; var = mus[1]-mu**2
    sk = (mus[2]-3*mu*mus[1]+2*mu**3)/var**mp.mpf('1.5')
    ku = (mus[3]-4*mu*mus[2]+6*mu**2*mus[1]-3*mu**4)/var**2
    print(f"  var={em(var)} skew={em(sk)} kurt={em(ku)}")
    if t_mgf is not None:
        print(f"  mgf({t_mgf})={em(mp.quad(lambda y: mp.e**(mp.mpf(t_mgf)*y)*pdf(y), pts))}")
    t = mp.mpf(t_res)
    intS = mp.quad(lambda y: sf(y), [p for p in pts if p < t] + [t])
    mrl = (mu - intS)/sf(t)
    mrev = (intS - t*sf(t))/cdf(t)
    print(f"  t={t_res}: int0tS={em(intS)} meanresid={em(mrl)} revresid={em(mrev)} ttt={em(intS/mu)} (at u=F(t)={em(cdf(t))})")
    med = quantile('0.5')
    I = lambda x: mp.quad(lambda y: y*pdf(y), [p for p in pts if p < x] + [x])
    d1 = 2*mu*cdf(mu) - 2*I(mu)
    d2 = mu - 2*I(med)
    print(f"  meandev_mu={em(d1)} meandev_med={em(d2)} median={em(med)}")
    p = mp.mpf(p_curve); qp = quantile(p_curve)
    print(f"  p={p_curve}: bonferroni={em(I(qp)/(p*mu))} lorenz={em(I(qp)/mu)}")
    gini = 1 - mp.quad(lambda y: sf(y)**2, pts)/mu
    print(f"  gini={em(gini)}")
    for r in renyi_rs:
        r_ = mp.mpf(r)
        fr = mp.quad(lambda y: pdf(y)**r_, pts)
        print(f"  renyi({r})={em(mp.log(fr)/(1-r_))}  intfr={em(fr)}")
    sh = -mp.quad(lambda y: pdf(y)*mp.log(pdf(y)), pts)
    print(f"  shannon={em(sh)}")
    for r in ('0.9999','1.0001'):
        r_ = mp.mpf(r)
        fr = mp.quad(lambda y: pdf(y)**r_, pts)
        print(f"  renyi({r})={em(mp.log(fr)/(1-r_))}")

report("P1", 1, 1, 1, '0.5', ys=[mp.log(2), '0.2', '3.0'], t_res='1.0', p_curve='0.3', t_mgf='0.3')
report("P2", 2, '0.5', '1.5', '0.3', ys=['1.7', '0.4', '6.0'], t_res='2.0', p_curve='0.3', t_mgf='0.1')
print("== extra means for series grid sanity ==")
for (a,g,th) in [('0.5','0.7','0.1'), ('5','2','0.9'), ('1.5','1','0.2'), ('0.5','2','0.9'), ('5','0.7','0.1')]:
    A,B,G,TH,L,pdf,cdf,sf,quantile = make(a, 1, g, th)
    mu = mp.quad(lambda y: y*pdf(y), qpts(quantile))
    print(f"  alpha={a} gamma={g} theta={th}: EY={em(mu)}")
print("== CEL mean identity ==")
print(f"  pi^2/(12 log 2) = {em(mp.pi**2/(12*mp.log(2)))}")
