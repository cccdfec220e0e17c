import numpy as np
from scipy import integrate
g,th,k,t=2.0,0.04,0.3,1.0
def F(p):
    G=g+0j
    O=np.sqrt(G**2+k**2*(p**2-1j*p)); a=O*t/2
    return g*G*th*t/k**2 - 2*g*th/k**2*np.log(np.cosh(a)+(O**2-G**2+2*g*G)/(2*g*O)*np.sinh(a))
p=np.linspace(0,400,400001)
phi=np.exp(F(p))
def pdf(x): return integrate.trapezoid(np.real(np.exp(1j*p*x)*phi),p)/np.pi
xs=np.linspace(1,4,601); v=np.array([pdf(x) for x in xs])
xm=np.linspace(-4,-1,601); vm=np.array([pdf(x) for x in xm])
print(integrate.simpson(v,x=xs), integrate.simpson(vm,x=xm))
