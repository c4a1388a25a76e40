package main

import (
	"fmt"
	"reflect"
)

type Service struct{}

func (Service) SafeMethod() {
	fmt.Println("safe method")
}

func (Service) UnsafeMethod() {
	fmt.Println("unsafe method would run here")
}

func main() {
	svc := Service{}
	methodName := "SafeMethod"
	// A value taken from configuration could swap the target here.
	methodName = "Unsafe" + "Method"
	method := reflect.ValueOf(svc).MethodByName(methodName)
	method.Call(nil)
}
